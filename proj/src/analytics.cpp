#include "agentpnl/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace agentpnl::analytics {

PnlSeries to_series(const pnl::LedgerResult& ledger) {
  PnlSeries s;
  if (ledger.points.empty()) {
    return s;
  }
  s.first = ledger.points.front().date;
  const auto n = ledger.points.size();
  s.realized.reserve(n);
  s.unrealized.reserve(n);
  s.total.reserve(n);
  s.market_value.reserve(n);
  for (const auto& p : ledger.points) {
    s.realized.push_back(p.realized_cum);
    s.unrealized.push_back(p.unrealized);
    s.total.push_back(p.total);
    s.market_value.push_back(p.quantity.to_double() * p.price);
  }
  return s;
}

PnlSeries aggregate_series(std::span<const PnlSeries> series) {
  PnlSeries out;
  bool any = false;
  Date first;
  Date last;
  for (const auto& s : series) {
    if (s.empty()) {
      continue;
    }
    if (!any) {
      first = s.first;
      last = s.last();
      any = true;
    } else {
      first = std::min(first, s.first);
      last = std::max(last, s.last());
    }
  }
  if (!any) {
    return out;
  }
  const auto n = static_cast<std::size_t>(last - first) + 1;
  out.first = first;
  out.realized.assign(n, 0.0);
  out.unrealized.assign(n, 0.0);
  out.total.assign(n, 0.0);
  out.market_value.assign(n, 0.0);
  auto add = [n](std::vector<Money>& dst, const std::vector<Money>& src, std::size_t offset) {
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[offset + i] += src[i];
    }
    for (std::size_t i = offset + src.size(); i < n; ++i) {
      dst[i] += src.back();
    }
  };
  for (const auto& s : series) {
    if (s.empty()) {
      continue;
    }
    const auto offset = static_cast<std::size_t>(s.first - first);
    add(out.realized, s.realized, offset);
    add(out.unrealized, s.unrealized, offset);
    add(out.total, s.total, offset);
    add(out.market_value, s.market_value, offset);
  }
  return out;
}

std::vector<WalletTotal> snapshot_totals(std::span<const WalletSeries> ledgers, Date snapshot) {
  std::map<std::pair<std::string, std::string>, Money> sums;
  for (const auto& l : ledgers) {
    if (l.total.empty()) {
      continue;
    }
    if (snapshot < l.total.first) {
      throw DomainError("snapshot " + snapshot.to_string() + " precedes ledger start for wallet " + l.wallet);
    }
    sums[{l.group, l.wallet}] += l.total.value_or_carry(snapshot, 0.0);
  }
  std::vector<WalletTotal> out;
  out.reserve(sums.size());
  for (const auto& [key, total] : sums) {
    out.push_back({key.second, key.first, total});
  }
  return out;
}

SummaryStats summary_stats(std::span<const WalletTotal> totals) {
  if (totals.empty()) {
    throw DomainError("summary_stats: no wallets");
  }
  std::vector<Money> v;
  v.reserve(totals.size());
  std::size_t profitable = 0;
  std::size_t loss = 0;
  for (const auto& t : totals) {
    v.push_back(t.total);
    profitable += t.total > 0.0 ? 1 : 0;
    loss += t.total < 0.0 ? 1 : 0;
  }
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  SummaryStats s;
  s.users = n;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  s.median = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  s.min = v.front();
  s.max = v.back();
  s.pct_profitable = static_cast<double>(profitable) / static_cast<double>(n);
  s.pct_loss = static_cast<double>(loss) / static_cast<double>(n);
  s.pct_zero = static_cast<double>(n - profitable - loss) / static_cast<double>(n);
  return s;
}

std::size_t top_count(std::size_t winners, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw DomainError("top fraction must lie in (0, 1]");
  }
  if (winners == 0) {
    return 0;
  }
  const double x = top_fraction * static_cast<double>(winners);
  const double nearest = std::round(x);
  // 0.29 * 100 evaluates to 28.999999999999996; treat such values as integral.
  const double floored = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::floor(x);
  return std::max<std::size_t>(1, static_cast<std::size_t>(floored));
}

ConcentrationReport concentration(std::span<const WalletTotal> totals, double top_fraction) {
  ConcentrationReport r;
  r.top_fraction = top_fraction;
  std::vector<const WalletTotal*> winners;
  for (const auto& t : totals) {
    if (t.total > 0.0) {
      winners.push_back(&t);
    }
  }
  r.winners = winners.size();
  r.top_count = top_count(r.winners, top_fraction);
  if (winners.empty()) {
    return r;
  }
  std::sort(winners.begin(), winners.end(), [](const WalletTotal* a, const WalletTotal* b) {
    if (a->total != b->total) {
      return a->total > b->total;
    }
    return std::tie(a->wallet, a->group) < std::tie(b->wallet, b->group);
  });
  for (std::size_t i = 0; i < winners.size(); ++i) {
    r.winner_sum += winners[i]->total;
    if (i < r.top_count) {
      r.top_sum += winners[i]->total;
    }
  }
  r.top_share = r.top_count == winners.size() ? 1.0 : r.top_sum / r.winner_sum;
  return r;
}

Buckets::Buckets(std::vector<double> boundaries) : edges_(std::move(boundaries)) {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!std::isfinite(edges_[i])) {
      throw DomainError("bucket boundaries must be finite");
    }
    if (i > 0 && !(edges_[i - 1] < edges_[i])) {
      throw DomainError("bucket boundaries must be strictly increasing");
    }
  }
  auto it = std::lower_bound(edges_.begin(), edges_.end(), 0.0);
  if (it == edges_.end() || *it != 0.0) {
    it = edges_.insert(it, 0.0);
  }
  zero_edge_ = static_cast<std::size_t>(it - edges_.begin());

  auto edge = [](double v) { return format_shortest(v); };
  for (std::size_t i = 0; i <= edges_.size(); ++i) {
    const std::string lo = i == 0 ? "-inf" : edge(edges_[i - 1]);
    if (i == edges_.size()) {
      labels_.push_back("(" + lo + "..inf)");
    } else if (i == zero_edge_) {
      labels_.push_back("(" + lo + "..0)");
      labels_.push_back("0");
    } else {
      labels_.push_back("(" + lo + ".." + edge(edges_[i]) + "]");
    }
  }
}

std::size_t Buckets::index_of(Money value) const {
  if (value == 0.0) {
    return zero_edge_ + 1;
  }
  const auto interval =
      static_cast<std::size_t>(std::lower_bound(edges_.begin(), edges_.end(), value) - edges_.begin());
  return interval <= zero_edge_ ? interval : interval + 1;
}

BucketMatrix bucket_distribution(std::span<const DailySeries<Money>> wallet_totals, const Buckets& buckets,
                                 std::span<const Date> dates) {
  BucketMatrix m;
  m.labels = buckets.labels();
  std::vector<std::size_t> counts(buckets.count());
  for (const Date d : dates) {
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t active = 0;
    for (const auto& s : wallet_totals) {
      if (s.empty() || d < s.first) {
        continue;
      }
      ++counts[buckets.index_of(s.value_or_carry(d, 0.0))];
      ++active;
    }
    if (active == 0) {
      continue;
    }
    std::vector<double> shares(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      shares[i] = static_cast<double>(counts[i]) / static_cast<double>(active);
    }
    m.dates.push_back(d);
    m.shares.push_back(std::move(shares));
    m.wallets.push_back(active);
  }
  return m;
}

double max_drawdown(std::span<const double> values) {
  if (values.empty()) {
    throw DomainError("max_drawdown: empty series");
  }
  double peak = 0.0;
  double worst = 0.0;
  for (const double v : values) {
    if (!(v > 0.0)) {
      throw DomainError("max_drawdown: non-positive value");
    }
    peak = std::max(peak, v);
    worst = std::max(worst, (peak - v) / peak);
  }
  return worst;
}

AthDecline decline_from_ath(const DailySeries<double>& series) {
  if (series.empty()) {
    throw DomainError("decline_from_ath: empty series");
  }
  std::size_t ath = 0;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (!(series.values[i] > 0.0)) {
      throw DomainError("decline_from_ath: non-positive value");
    }
    if (series.values[i] > series.values[ath]) {
      ath = i;
    }
  }
  const double peak = series.values[ath];
  return {(peak - series.values.back()) / peak, series.first + static_cast<std::int32_t>(ath)};
}

namespace {

TokenBenchmark measure(const std::string& token, const grid::PriceSeries& prices) {
  const auto decline = decline_from_ath(prices);
  return {token, prices.first, prices.last(), max_drawdown(prices.values), decline.decline, decline.ath_date};
}

} // namespace

BenchmarkReport benchmark_report(const std::map<std::string, grid::PriceSeries>& prices,
                                 const std::string& benchmark_token) {
  BenchmarkReport report;
  const auto bench = prices.find(benchmark_token);
  if (bench == prices.end() || bench->second.empty()) {
    throw InputError("benchmark token '" + benchmark_token + "' has no prices");
  }
  try {
    report.benchmark = measure(benchmark_token, bench->second);
  } catch (const DomainError&) {
    throw InputError("benchmark token '" + benchmark_token + "' has a non-positive price");
  }
  double sum = 0.0;
  for (const auto& [token, series] : prices) {
    if (token == benchmark_token) {
      continue;
    }
    if (series.empty() ||
        std::any_of(series.values.begin(), series.values.end(), [](double v) { return !(v > 0.0); })) {
      report.skipped.push_back(token);
      continue;
    }
    report.tokens.push_back(measure(token, series));
    sum += report.tokens.back().decline_from_ath;
  }
  if (!report.tokens.empty()) {
    report.average_decline = sum / static_cast<double>(report.tokens.size());
  }
  return report;
}

McToAum mc_to_aum(const DailySeries<double>& market_cap, const DailySeries<double>& aum) {
  if (market_cap.empty() || aum.empty()) {
    throw DomainError("mc_to_aum: empty series");
  }
  const Date start = std::max(market_cap.first, aum.first);
  const Date end = std::min(market_cap.last(), aum.last());
  if (start > end) {
    throw DomainError("mc_to_aum: series do not overlap");
  }
  McToAum out;
  for (Date d = start; d <= end; d = d.next()) {
    const double a = aum.at(d);
    if (!(a > 0.0)) {
      out.skipped_days.push_back(d);
      continue;
    }
    const double ratio = market_cap.at(d) / a;
    if (out.ratios.empty() || ratio > out.peak_ratio) {
      out.peak_ratio = ratio;
      out.peak_date = d;
    }
    out.ratios.emplace_back(d, ratio);
  }
  if (out.ratios.empty()) {
    throw DomainError("mc_to_aum: no day with positive AUM");
  }
  return out;
}

} // namespace agentpnl::analytics
