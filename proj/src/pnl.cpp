#include "agentpnl/pnl.hpp"

#include <algorithm>

namespace agentpnl::pnl {

std::vector<InferredTrade> infer_trades(const grid::AlignedLedgerInput& input) {
  std::vector<InferredTrade> trades;
  const auto& q = input.quantity.values;
  const auto& p = input.price.values;
  Quantity previous;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Quantity delta = q[i] - previous;
    previous = q[i];
    if (delta.is_zero()) {
      continue;
    }
    trades.push_back({input.quantity.first + static_cast<std::int32_t>(i),
                      delta.is_negative() ? Side::sell : Side::buy, delta.abs(), p[i]});
  }
  return trades;
}

Lots build_lots(std::span<const InferredTrade> trades) {
  Lots lots;
  Quantity bought;
  Quantity sold;
  for (const auto& t : trades) {
    if (t.side == Side::buy) {
      bought += t.quantity;
      lots.buys.push_back({lots.buys.size() + 1, t.date, t.quantity, t.price, bought});
    } else {
      sold += t.quantity;
      lots.sells.push_back({lots.sells.size() + 1, t.date, t.quantity, t.price, sold});
    }
  }
  return lots;
}

std::vector<LotMatch> fifo_match(std::span<const Lot> buys, std::span<const Lot> sells) {
  std::vector<LotMatch> matches;
  std::size_t b = 0;
  std::size_t s = 0;
  while (b < buys.size() && s < sells.size()) {
    const Quantity hi = min(buys[b].cumulative, sells[s].cumulative);
    const Quantity lo = max(buys[b].range_begin(), sells[s].range_begin());
    const Quantity overlap = hi - lo;
    if (overlap > Quantity{}) {
      matches.push_back({sells[s].index, buys[b].index, overlap, sells[s].price, buys[b].price});
    }
    if (buys[b].cumulative < sells[s].cumulative) {
      ++b;
    } else if (sells[s].cumulative < buys[b].cumulative) {
      ++s;
    } else {
      ++b;
      ++s;
    }
  }
  return matches;
}

std::vector<Money> realized_pnl(std::span<const LotMatch> matches, std::span<const Lot> sells) {
  std::vector<Money> out(sells.size(), 0.0);
  for (const auto& m : matches) {
    out[m.sell - 1] += m.quantity.to_double() * (m.sell_price - m.buy_price);
  }
  return out;
}

DailySeries<Money> cumulative_realized(std::span<const Lot> sells, std::span<const Money> per_sell,
                                       Date first, std::size_t days) {
  std::vector<Money> values(days, 0.0);
  std::size_t next = 0;
  Money running = 0.0;
  for (std::size_t i = 0; i < days; ++i) {
    const Date d = first + static_cast<std::int32_t>(i);
    while (next < sells.size() && sells[next].date <= d) {
      running += per_sell[next];
      ++next;
    }
    values[i] = running;
  }
  return {first, std::move(values)};
}

CostBasisSeries cost_basis_series(std::span<const Lot> buys, std::span<const Lot> sells,
                                  std::span<const LotMatch> matches, Date first, std::size_t days) {
  CostBasisSeries out{{first, std::vector<Money>(days, 0.0)},
                      {first, std::vector<Money>(days, 0.0)},
                      {first, std::vector<Money>(days, 0.0)}};
  std::size_t next_buy = 0;
  std::size_t next_match = 0;
  Money buy_notional = 0.0;
  Money sold_cost = 0.0;
  Quantity bought;
  Quantity matched;
  for (std::size_t i = 0; i < days; ++i) {
    const Date d = first + static_cast<std::int32_t>(i);
    while (next_buy < buys.size() && buys[next_buy].date <= d) {
      buy_notional += buys[next_buy].quantity.to_double() * buys[next_buy].price;
      bought += buys[next_buy].quantity;
      ++next_buy;
    }
    while (next_match < matches.size() && sells[matches[next_match].sell - 1].date <= d) {
      sold_cost += matches[next_match].quantity.to_double() * matches[next_match].buy_price;
      matched += matches[next_match].quantity;
      ++next_match;
    }
    out.buy_notional.values[i] = buy_notional;
    out.sold_cost.values[i] = sold_cost;
    out.cost_basis.values[i] = matched == bought ? 0.0 : std::max(buy_notional - sold_cost, 0.0);
  }
  return out;
}

LedgerResult compute_ledger(const grid::AlignedLedgerInput& input) {
  LedgerResult result;
  result.key = input.key;
  const std::size_t days = input.days();
  const Date first = input.first();

  const auto trades = infer_trades(input);
  const auto lots = build_lots(trades);
  result.matches = fifo_match(lots.buys, lots.sells);

  Quantity sold = lots.sells.empty() ? Quantity{} : lots.sells.back().cumulative;
  Quantity matched;
  for (const auto& m : result.matches) {
    matched += m.quantity;
  }
  result.unmatched_sell_quantity = sold - matched;

  const auto per_sell = realized_pnl(result.matches, lots.sells);
  const auto realized = cumulative_realized(lots.sells, per_sell, first, days);
  const auto basis = cost_basis_series(lots.buys, lots.sells, result.matches, first, days);

  result.points.resize(days);
  for (std::size_t i = 0; i < days; ++i) {
    auto& pt = result.points[i];
    pt.date = first + static_cast<std::int32_t>(i);
    pt.quantity = input.quantity.values[i];
    pt.price = input.price.values[i];
    pt.buy_notional_cum = basis.buy_notional.values[i];
    pt.sold_cost_cum = basis.sold_cost.values[i];
    pt.cost_basis = basis.cost_basis.values[i];
    pt.realized_cum = realized.values[i];
    pt.unrealized = unrealized_pnl(pt.quantity, pt.price, pt.cost_basis);
    pt.total = pt.realized_cum + pt.unrealized;
  }
  return result;
}

} // namespace agentpnl::pnl
