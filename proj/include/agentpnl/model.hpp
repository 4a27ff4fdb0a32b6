#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agentpnl {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fatal problem with an input file (bad header, malformed cap table, ...).
class InputError : public Error {
public:
  using Error::Error;
};

/// Invalid run configuration or invalid parameters.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A precondition of a domain operation was violated.
class DomainError : public Error {
public:
  using Error::Error;
};

/// UTC calendar day, stored as days since 1970-01-01.
class Date {
public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);
  /// Strict `YYYY-MM-DD`. Returns nullopt on any malformed or impossible date.
  static std::optional<Date> parse(std::string_view text);
  static Date parse_or_throw(std::string_view text);

  [[nodiscard]] constexpr std::int32_t days() const { return days_; }
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] constexpr Date next() const { return Date{days_ + 1}; }
  [[nodiscard]] constexpr Date prev() const { return Date{days_ - 1}; }
  constexpr Date operator+(std::int32_t n) const { return Date{days_ + n}; }
  constexpr Date operator-(std::int32_t n) const { return Date{days_ - n}; }
  constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }

  friend constexpr auto operator<=>(Date, Date) = default;

private:
  std::int32_t days_ = 0;
};

/// Inclusive, ascending list of consecutive days. Throws DomainError if first > last.
std::vector<Date> date_range(Date first, Date last);

/// Instant with second precision, seconds since the Unix epoch (UTC).
struct Timestamp {
  std::int64_t seconds = 0;

  /// Strict `YYYY-MM-DDTHH:MM:SSZ`.
  static std::optional<Timestamp> parse(std::string_view text);
  [[nodiscard]] Date date() const;
  [[nodiscard]] std::string to_string() const;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

/// Exact decimal with 18 fractional digits, backed by a 128-bit integer.
///
/// Balances on chain are exact, so token quantities never go through
/// binary floating point until they are multiplied by a price. The type is
/// signed so that daily deltas can be represented; balance contexts reject
/// negative values at ingest.
class Quantity {
public:
  using Raw = __int128;
  static constexpr int kScale = 18;
  static constexpr Raw kOne = static_cast<Raw>(1000000000000000000LL);

  constexpr Quantity() = default;
  static constexpr Quantity from_raw(Raw raw) {
    Quantity q;
    q.raw_ = raw;
    return q;
  }
  static constexpr Quantity from_integer(std::int64_t whole) {
    return from_raw(static_cast<Raw>(whole) * kOne);
  }
  /// Plain decimal notation (`-12.5`, `0.000001`, `7`). No exponents, no
  /// thousands separators, at most 18 fractional digits.
  static std::optional<Quantity> parse(std::string_view text);

  [[nodiscard]] constexpr Raw raw() const { return raw_; }
  [[nodiscard]] double to_double() const;
  /// Shortest exact decimal rendering (trailing fractional zeros dropped).
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] constexpr bool is_zero() const { return raw_ == 0; }
  [[nodiscard]] constexpr bool is_negative() const { return raw_ < 0; }
  [[nodiscard]] constexpr Quantity abs() const { return from_raw(raw_ < 0 ? -raw_ : raw_); }

  constexpr Quantity operator+(Quantity o) const { return from_raw(raw_ + o.raw_); }
  constexpr Quantity operator-(Quantity o) const { return from_raw(raw_ - o.raw_); }
  constexpr Quantity operator-() const { return from_raw(-raw_); }
  constexpr Quantity& operator+=(Quantity o) {
    raw_ += o.raw_;
    return *this;
  }
  constexpr Quantity& operator-=(Quantity o) {
    raw_ -= o.raw_;
    return *this;
  }

  friend constexpr auto operator<=>(Quantity, Quantity) = default;

private:
  Raw raw_ = 0;
};

constexpr Quantity min(Quantity a, Quantity b) { return a < b ? a : b; }
constexpr Quantity max(Quantity a, Quantity b) { return a < b ? b : a; }

/// USD per token unit.
using Price = double;
/// Signed USD amount.
using Money = double;

/// Absolute tolerance used when comparing money values.
inline constexpr double kMoneyTolerance = 1e-9;

/// Round-half-even at `places` decimals, applied to the shortest decimal
/// representation of `value` (so 2.5e-6 and -0.1234565 round as written).
Money round_money(Money value, int places);

/// Fixed-point rendering at `places` decimals with round-half-even.
std::string format_money(Money value, int places = 6);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_shortest(double value);

/// Parses a finite decimal number (`.` separator, optional exponent).
std::optional<double> parse_double(std::string_view text);

struct LedgerKey {
  std::string wallet;
  std::string token;

  friend auto operator<=>(const LedgerKey&, const LedgerKey&) = default;
};

struct BalanceRecord {
  Date date;
  std::string wallet;
  std::string account;
  std::string token;
  Quantity balance;

  friend bool operator==(const BalanceRecord&, const BalanceRecord&) = default;
};

struct PriceObservation {
  Timestamp timestamp;
  std::string token;
  Price price = 0.0;

  friend bool operator==(const PriceObservation&, const PriceObservation&) = default;
};

} // namespace agentpnl
