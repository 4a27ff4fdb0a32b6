#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agentpnl/model.hpp"

namespace agentpnl::ingest {

/// One data-quality finding. `line` is 1-based (header is line 1); 0 when the
/// finding is not tied to a line.
struct Diagnostic {
  std::string source;
  std::size_t line = 0;
  std::string kind;
  std::string message;

  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct BalanceParse {
  std::vector<BalanceRecord> records; // sorted by (wallet, account, token, date)
  std::vector<Diagnostic> diagnostics;
  std::size_t rows_read = 0;
  std::size_t rows_rejected = 0;
  std::size_t duplicates_collapsed = 0;
};

struct PriceParse {
  std::vector<PriceObservation> observations; // sorted by (token, timestamp)
  std::vector<Diagnostic> diagnostics;
  std::size_t rows_read = 0;
  std::size_t rows_rejected = 0;
};

/// Maximum admissible price observation per token. Absent tokens are uncapped.
using CapTable = std::map<std::string, Price, std::less<>>;

struct DateSpan {
  Date first;
  Date last;
  friend bool operator==(const DateSpan&, const DateSpan&) = default;
};

struct DatasetSummary {
  std::size_t n_balance_records = 0;
  std::size_t n_price_observations = 0;
  std::size_t n_wallets = 0;
  std::size_t n_accounts = 0;
  std::size_t n_tokens = 0;
  std::optional<DateSpan> balance_span;
  std::optional<DateSpan> price_span;
  std::vector<std::string> unpriced_tokens;
  std::vector<Diagnostic> diagnostics;
};

inline constexpr const char* kBalanceHeader = "date,wallet,account,token,balance";
inline constexpr const char* kPriceHeader = "timestamp,token,price";
inline constexpr const char* kCapHeader = "token,max_price";

/// Parses the balance snapshot CSV. Duplicate (wallet, account, token, date)
/// keys collapse to the last occurrence; negative or malformed rows are
/// skipped with a diagnostic. Throws InputError on a bad header or a row with
/// the wrong number of columns. A zero-byte stream is an empty table.
BalanceParse parse_balances(std::istream& in);

/// Parses the price observation CSV. Observations are never deduplicated.
PriceParse parse_prices(std::istream& in);

/// Parses the cap table. Any malformed row, non-positive cap or duplicate
/// token is fatal.
CapTable parse_caps(std::istream& in);

DatasetSummary validate_dataset(const BalanceParse& balances, const PriceParse& prices,
                                const CapTable& caps);

void write_balances(std::ostream& out, std::span<const BalanceRecord> records);
void write_prices(std::ostream& out, std::span<const PriceObservation> observations);
void write_caps(std::ostream& out, const CapTable& caps);

} // namespace agentpnl::ingest
