#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentpnl/analytics.hpp"
#include "agentpnl/grid.hpp"
#include "agentpnl/ingest.hpp"
#include "agentpnl/pnl.hpp"

namespace agentpnl::pipeline {

/// Editorial platform labels: tokens map to the platform whose native token
/// they are; treasury wallets map to the platform they belong to.
struct Grouping {
  std::map<std::string, std::string, std::less<>> token_platform;
  std::map<std::string, std::string, std::less<>> wallet_platform;
  /// False when no mapping file was given; every ledger is then in "all".
  bool explicit_mapping = false;

  /// Platform a ledger is reported under; empty when unassigned.
  [[nodiscard]] std::string platform_of(const LedgerKey& key) const;
  [[nodiscard]] bool is_treasury(std::string_view wallet) const;
};

inline constexpr const char* kGroupHeader = "kind,id,platform";
inline constexpr const char* kDefaultPlatform = "all";

/// Parses `kind,id,platform` rows where kind is `token` or `wallet`.
Grouping parse_groups(std::istream& in);

struct Dataset {
  ingest::BalanceParse balances;
  ingest::PriceParse prices;
  ingest::CapTable caps;
  ingest::DatasetSummary summary;
};

Dataset make_dataset(ingest::BalanceParse balances, ingest::PriceParse prices, ingest::CapTable caps);

struct Options {
  std::optional<Date> snapshot;
  std::size_t threads = 1;
  /// Ledgers computed per parallel batch; bounds peak memory.
  std::size_t batch = 4096;
};

/// Latest date across both tables, or nullopt when both are empty.
std::optional<Date> default_end_date(const Dataset& data);

/// Capped, median-aggregated, forward-filled price series per token through `end`.
std::map<std::string, grid::PriceSeries> build_price_series(const Dataset& data, Date end,
                                                            std::vector<ingest::Diagnostic>& diagnostics);

struct LedgerPlan {
  LedgerKey key;
  std::string platform;
  /// One run of date-sorted records per token account, truncated at the end date.
  std::vector<std::span<const BalanceRecord>> accounts;
};

/// Everything needed to compute ledgers, sorted by (platform, wallet, token).
struct Plan {
  std::optional<Date> end;
  std::vector<LedgerPlan> ledgers;
  std::map<std::string, grid::PriceSeries> prices;
  std::vector<ingest::Diagnostic> diagnostics;
};

Plan make_plan(const Dataset& data, const Grouping& grouping, const Options& options);

using LedgerSink = std::function<void(const LedgerPlan&, const pnl::LedgerResult&)>;

/// Computes every planned ledger and hands results to `sink` in plan order,
/// independent of the thread count. Skipped ledgers are reported in
/// `plan.diagnostics`.
void run_ledgers(Plan& plan, const Options& options, const LedgerSink& sink);

/// Writes the `ledgers.csv` header and rows.
class LedgerCsvWriter {
public:
  explicit LedgerCsvWriter(std::ostream& out);
  void write(const pnl::LedgerResult& ledger);

private:
  std::ostream& out_;
  std::string buffer_;
};

inline constexpr const char* kLedgerHeader = "wallet,token,date,quantity,price,cost_basis,realized_cum,unrealized,total";

/// Collects per-wallet user totals and per-platform treasury series.
class ReportAccumulator {
public:
  explicit ReportAccumulator(const Grouping& grouping) : grouping_(grouping) {}
  void add(const LedgerPlan& plan, const pnl::LedgerResult& ledger);

  /// User wallets per platform, one merged total series per wallet.
  [[nodiscard]] const std::map<std::string, std::vector<analytics::WalletSeries>>& users() const { return users_; }
  /// Treasury PnL per platform, aggregated across its wallets and tokens.
  [[nodiscard]] std::map<std::string, analytics::PnlSeries> treasuries() const;

private:
  const Grouping& grouping_;
  std::map<std::string, std::vector<analytics::WalletSeries>> users_;
  std::map<std::string, std::vector<analytics::PnlSeries>> treasury_ledgers_;
};

/// Merges `add` into `into` over the union range (zero prefix, carried suffix).
void merge_totals(DailySeries<Money>& into, const DailySeries<Money>& add);

} // namespace agentpnl::pipeline
