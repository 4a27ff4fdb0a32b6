#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentpnl/daily_series.hpp"
#include "agentpnl/grid.hpp"
#include "agentpnl/model.hpp"
#include "agentpnl/pnl.hpp"

namespace agentpnl::analytics {

/// Daily realized/unrealized/total PnL plus mark-to-market holdings value.
struct PnlSeries {
  Date first;
  std::vector<Money> realized;
  std::vector<Money> unrealized;
  std::vector<Money> total;
  std::vector<Money> market_value;

  [[nodiscard]] std::size_t size() const { return total.size(); }
  [[nodiscard]] bool empty() const { return total.empty(); }
  [[nodiscard]] Date last() const { return first + static_cast<std::int32_t>(total.size()) - 1; }
  [[nodiscard]] DailySeries<Money> total_series() const { return {first, total}; }
  [[nodiscard]] DailySeries<Money> market_value_series() const { return {first, market_value}; }
};

PnlSeries to_series(const pnl::LedgerResult& ledger);

/// Sum over the union of ranges. Each input is zero before its first day and
/// carries its last row past its end.
PnlSeries aggregate_series(std::span<const PnlSeries> series);

/// One ledger's total PnL, tagged with its wallet and platform group.
struct WalletSeries {
  std::string wallet;
  std::string group;
  DailySeries<Money> total;
};

struct WalletTotal {
  std::string wallet;
  std::string group;
  Money total = 0.0;

  friend bool operator==(const WalletTotal&, const WalletTotal&) = default;
};

/// Per (group, wallet): sum of every ledger's total carried forward to
/// `snapshot`. Output is sorted by (group, wallet).
std::vector<WalletTotal> snapshot_totals(std::span<const WalletSeries> ledgers, Date snapshot);

struct SummaryStats {
  std::size_t users = 0;
  Money mean = 0.0;
  Money median = 0.0;
  Money min = 0.0;
  Money max = 0.0;
  double pct_profitable = 0.0;
  double pct_loss = 0.0;
  double pct_zero = 0.0;
};

/// Throws DomainError on empty input. "Zero" means exactly 0.0.
SummaryStats summary_stats(std::span<const WalletTotal> totals);

struct ConcentrationReport {
  std::size_t winners = 0;
  double top_fraction = 0.0;
  std::size_t top_count = 0;
  Money top_sum = 0.0;
  Money winner_sum = 0.0;
  /// Absent when there are no winners.
  std::optional<double> top_share;
};

/// top_count = max(1, floor(fraction * winners)).
std::size_t top_count(std::size_t winners, double top_fraction);

ConcentrationReport concentration(std::span<const WalletTotal> totals, double top_fraction);

/// Bucket edges with a dedicated {0} bucket. Intervals are (lower, upper];
/// the interval ending at 0 excludes 0 itself. Labels read `(-inf..-100]`,
/// `(-100..0)`, `0`, `(0..100]`, `(100..inf)`.
class Buckets {
public:
  /// Throws DomainError unless `boundaries` is strictly increasing and
  /// finite. 0 is added as an edge when missing.
  explicit Buckets(std::vector<double> boundaries);

  [[nodiscard]] std::size_t count() const { return edges_.size() + 2; }
  [[nodiscard]] std::size_t index_of(Money value) const;
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] const std::vector<double>& edges() const { return edges_; }

private:
  std::vector<double> edges_;
  std::size_t zero_edge_ = 0;
  std::vector<std::string> labels_;
};

inline const std::vector<double> kDefaultBucketBoundaries = {-10000.0, -1000.0, -100.0, 0.0,
                                                             100.0,    1000.0,  10000.0};

struct BucketMatrix {
  std::vector<std::string> labels;
  std::vector<Date> dates;
  /// shares[date][bucket]
  std::vector<std::vector<double>> shares;
  std::vector<std::size_t> wallets;
};

/// For each date, buckets every wallet whose series has started by then
/// (value carried forward past its end). Dates with no such wallet are
/// omitted.
BucketMatrix bucket_distribution(std::span<const DailySeries<Money>> wallet_totals, const Buckets& buckets,
                                 std::span<const Date> dates);

/// max over t of (running max - v_t) / running max. Throws DomainError on
/// non-positive values or empty input.
double max_drawdown(std::span<const double> values);

struct AthDecline {
  double decline = 0.0;
  Date ath_date;
};

/// (max - last) / max and the first date reaching the max.
AthDecline decline_from_ath(const DailySeries<double>& series);

struct TokenBenchmark {
  std::string token;
  Date first;
  Date last;
  double max_drawdown = 0.0;
  double decline_from_ath = 0.0;
  Date ath_date;
};

struct BenchmarkReport {
  std::vector<TokenBenchmark> tokens;
  TokenBenchmark benchmark;
  /// Mean decline over non-benchmark tokens; absent when there are none.
  std::optional<double> average_decline;
  std::vector<std::string> skipped;
};

/// Tokens with a non-positive price day are skipped (listed in `skipped`).
/// Throws InputError if the benchmark is missing or has a non-positive price.
BenchmarkReport benchmark_report(const std::map<std::string, grid::PriceSeries>& prices,
                                 const std::string& benchmark_token);

struct McToAum {
  double peak_ratio = 0.0;
  Date peak_date;
  std::vector<std::pair<Date, double>> ratios;
  std::vector<Date> skipped_days;
};

/// Element-wise market cap / AUM over the overlapping range; days with
/// AUM <= 0 are skipped. Throws DomainError if the ranges do not overlap or
/// every overlapping day is skipped.
McToAum mc_to_aum(const DailySeries<double>& market_cap, const DailySeries<double>& aum);

} // namespace agentpnl::analytics
