#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "agentpnl/daily_series.hpp"
#include "agentpnl/grid.hpp"
#include "agentpnl/model.hpp"

namespace agentpnl::pnl {

enum class Side { buy, sell };

/// Net daily flow of one ledger, priced at that day's median.
struct InferredTrade {
  Date date;
  Side side = Side::buy;
  Quantity quantity; // |delta q|, always > 0
  Price price = 0.0;

  friend bool operator==(const InferredTrade&, const InferredTrade&) = default;
};

/// A buy or sell lot. `index` is 1-based; `cumulative` is the running sum of
/// quantities through this lot, so the lot occupies the range
/// [cumulative - quantity, cumulative].
struct Lot {
  std::size_t index = 0;
  Date date;
  Quantity quantity;
  Price price = 0.0;
  Quantity cumulative;

  [[nodiscard]] Quantity range_begin() const { return cumulative - quantity; }
  friend bool operator==(const Lot&, const Lot&) = default;
};

struct Lots {
  std::vector<Lot> buys;
  std::vector<Lot> sells;
};

/// Quantity of buy lot `buy` consumed by sell lot `sell` (both 1-based).
struct LotMatch {
  std::size_t sell = 0;
  std::size_t buy = 0;
  Quantity quantity;
  Price sell_price = 0.0;
  Price buy_price = 0.0;

  friend bool operator==(const LotMatch&, const LotMatch&) = default;
};

struct PnlPoint {
  Date date;
  Quantity quantity;
  Price price = 0.0;
  Money buy_notional_cum = 0.0;
  Money sold_cost_cum = 0.0;
  Money cost_basis = 0.0;
  Money realized_cum = 0.0;
  Money unrealized = 0.0;
  Money total = 0.0;
};

struct LedgerResult {
  LedgerKey key;
  std::vector<PnlPoint> points;
  std::vector<LotMatch> matches;
  /// Sell quantity with no buy lot to match. Zero on consistent data.
  Quantity unmatched_sell_quantity;
};

struct CostBasisSeries {
  DailySeries<Money> buy_notional;
  DailySeries<Money> sold_cost;
  DailySeries<Money> cost_basis;
};

/// Day one's quantity is an opening buy; after that every nonzero delta
/// becomes a buy (increase) or sell (decrease) at that day's price.
std::vector<InferredTrade> infer_trades(const grid::AlignedLedgerInput& input);

/// Splits trades into buy and sell lots with 1-based indices and cumulative
/// quantities.
Lots build_lots(std::span<const InferredTrade> trades);

/// FIFO matching as the intersection of cumulative quantity ranges:
///
///   m(s, b) = max(0, min(B_b, S_s) - max(B_{b-1}, S_{s-1}))
///
/// Only pairs with positive overlap are returned, in (sell, buy) order. Since
/// both range sequences are ascending, a merge walk visits every candidate
/// pair with nonzero overlap.
std::vector<LotMatch> fifo_match(std::span<const Lot> buys, std::span<const Lot> sells);

/// Realized PnL per sell lot, indexed like `sells`.
std::vector<Money> realized_pnl(std::span<const LotMatch> matches, std::span<const Lot> sells);

/// Running sum of per-sell realized PnL by sell date over `days` days from `first`.
DailySeries<Money> cumulative_realized(std::span<const Lot> sells, std::span<const Money> per_sell,
                                       Date first, std::size_t days);

/// Cumulative buy notional, cumulative FIFO cost of sold quantity and the
/// remaining cost basis max(buy - sold, 0). The basis is exactly zero on days
/// when every bought unit has been matched.
CostBasisSeries cost_basis_series(std::span<const Lot> buys, std::span<const Lot> sells,
                                  std::span<const LotMatch> matches, Date first, std::size_t days);

inline Money unrealized_pnl(Quantity quantity, Price price, Money cost_basis) {
  return quantity.to_double() * price - cost_basis;
}

LedgerResult compute_ledger(const grid::AlignedLedgerInput& input);

} // namespace agentpnl::pnl
