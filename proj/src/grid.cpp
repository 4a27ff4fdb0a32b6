#include "agentpnl/grid.hpp"

#include <algorithm>
#include <vector>

namespace agentpnl::grid {

QuantitySeries fill_account_series(std::span<const BalanceRecord> records, Date end) {
  if (records.empty()) {
    throw DomainError("fill_account_series: empty record list");
  }
  if (end < records.back().date) {
    throw DomainError("fill_account_series: end precedes last record");
  }
  const Date first = records.front().date;
  std::vector<Quantity> values;
  values.reserve(static_cast<std::size_t>(end - first) + 1);
  std::size_t next = 0;
  Quantity current;
  for (Date d = first; d <= end; d = d.next()) {
    while (next < records.size() && records[next].date <= d) {
      current = records[next].balance;
      ++next;
    }
    values.push_back(current);
  }
  return {first, std::move(values)};
}

QuantitySeries aggregate_wallet_balances(std::span<const QuantitySeries> accounts) {
  if (accounts.empty()) {
    throw DomainError("aggregate_wallet_balances: no account series");
  }
  if (accounts.size() == 1) {
    return accounts.front();
  }
  Date first = accounts.front().first;
  Date last = accounts.front().last();
  for (const auto& a : accounts) {
    if (a.empty()) {
      throw DomainError("aggregate_wallet_balances: empty account series");
    }
    first = std::min(first, a.first);
    last = std::max(last, a.last());
  }
  std::vector<Quantity> sum(static_cast<std::size_t>(last - first) + 1);
  for (const auto& a : accounts) {
    const auto offset = static_cast<std::size_t>(a.first - first);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      sum[offset + i] += a.values[i];
    }
    for (std::size_t i = offset + a.values.size(); i < sum.size(); ++i) {
      sum[i] += a.values.back();
    }
  }
  return {first, std::move(sum)};
}

SparsePrices daily_median_price(std::span<const PriceObservation> observations,
                                std::optional<Price> cap) {
  std::map<Date, std::vector<Price>> by_day;
  for (const auto& o : observations) {
    if (cap && o.price > *cap) {
      continue;
    }
    by_day[o.timestamp.date()].push_back(o.price);
  }
  SparsePrices out;
  for (auto& [day, prices] : by_day) {
    std::sort(prices.begin(), prices.end());
    const std::size_t n = prices.size();
    out.emplace_hint(out.end(), day,
                     n % 2 == 1 ? prices[n / 2] : (prices[n / 2 - 1] + prices[n / 2]) / 2.0);
  }
  return out;
}

PriceSeries fill_price_series(const SparsePrices& daily, Date end) {
  if (daily.empty()) {
    throw DomainError("fill_price_series: no priced days");
  }
  if (end < daily.rbegin()->first) {
    throw DomainError("fill_price_series: end precedes last priced day");
  }
  const Date first = daily.begin()->first;
  std::vector<Price> values;
  values.reserve(static_cast<std::size_t>(end - first) + 1);
  auto it = daily.begin();
  Price current = it->second;
  for (Date d = first; d <= end; d = d.next()) {
    if (it != daily.end() && it->first == d) {
      current = it->second;
      ++it;
    }
    values.push_back(current);
  }
  return {first, std::move(values)};
}

std::optional<AlignedLedgerInput> align(LedgerKey key, const QuantitySeries& quantity,
                                        const PriceSeries& price, Date end) {
  if (quantity.empty() || price.empty()) {
    return std::nullopt;
  }
  const Date start = std::max(quantity.first, price.first);
  if (start > end || quantity.last() < price.first) {
    return std::nullopt;
  }
  const auto n = static_cast<std::size_t>(end - start) + 1;
  std::vector<Quantity> q;
  std::vector<Price> p;
  q.reserve(n);
  p.reserve(n);
  for (Date d = start; d <= end; d = d.next()) {
    q.push_back(quantity.value_or_carry(d, Quantity{}));
    p.push_back(price.value_or_carry(d, 0.0));
  }
  return AlignedLedgerInput{std::move(key), {start, std::move(q)}, {start, std::move(p)}};
}

} // namespace agentpnl::grid
