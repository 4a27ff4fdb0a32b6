#pragma once

#include <map>
#include <optional>
#include <span>

#include "agentpnl/daily_series.hpp"
#include "agentpnl/model.hpp"

namespace agentpnl::grid {

using QuantitySeries = DailySeries<Quantity>;
using PriceSeries = DailySeries<Price>;
using SparsePrices = std::map<Date, Price>;

/// Quantity and price for one wallet-token pair over an identical range.
struct AlignedLedgerInput {
  LedgerKey key;
  QuantitySeries quantity;
  PriceSeries price;

  [[nodiscard]] Date first() const { return quantity.first; }
  [[nodiscard]] Date last() const { return quantity.last(); }
  [[nodiscard]] std::size_t days() const { return quantity.size(); }
};

/// Forward-fills one token account's records (sorted by date, unique dates)
/// from its first record through `end`.
QuantitySeries fill_account_series(std::span<const BalanceRecord> records, Date end);

/// Element-wise sum of per-account series of one wallet-token pair. An
/// account contributes zero before its first day and carries its last value
/// past its end.
QuantitySeries aggregate_wallet_balances(std::span<const QuantitySeries> accounts);

/// Median price per UTC day after dropping observations strictly above `cap`.
/// Days with no surviving observation are absent.
SparsePrices daily_median_price(std::span<const PriceObservation> observations,
                                std::optional<Price> cap);

/// Forward-fills daily prices from the first priced day through `end`.
PriceSeries fill_price_series(const SparsePrices& daily, Date end);

/// Restricts both series to [max(first days), end]. Returns nullopt when the
/// ranges cannot be aligned (the ledger is skipped).
std::optional<AlignedLedgerInput> align(LedgerKey key, const QuantitySeries& quantity,
                                        const PriceSeries& price, Date end);

} // namespace agentpnl::grid
