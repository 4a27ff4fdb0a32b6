#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agentpnl/daily_series.hpp"
#include "agentpnl/model.hpp"
#include "agentpnl/pnl.hpp"

namespace agentpnl::synth {

struct ScenarioParams {
  std::size_t wallets = 100;
  std::size_t tokens = 3;
  std::int32_t days = 90;
  Date start = Date::from_ymd(2024, 11, 1);
  /// Expected number of trade events per wallet-token-day (Poisson).
  double intensity = 0.1;
  /// Daily log-volatility of each token's reference price walk.
  double volatility = 0.05;
  /// Probability that a trading day is an intraday round trip.
  double round_trip_prob = 0.0;
  /// Maximum relative offset of round-trip legs from the reference price.
  double intraday_jitter = 0.02;
  /// Probability that a sell event liquidates the whole position.
  double liquidation_prob = 0.2;
  /// Cap on trading days per wallet-token; 0 means unlimited.
  std::size_t max_trade_days = 0;
  /// Probability per token-day of an anomalous price print (filtered by caps).
  double outlier_prob = 0.0;
  /// Token accounts per wallet-token pair are drawn from [1, max_accounts].
  std::size_t max_accounts = 2;
  /// When set, wallet i (i < tokens) is the treasury of platform i.
  bool treasury_wallets = true;

  [[nodiscard]] Date end() const { return start + days - 1; }
  /// Throws ConfigError when counts are zero or probabilities out of range.
  void validate() const;
};

/// Reads `key=value` lines (`#` comments, blank lines ignored) over defaults.
ScenarioParams parse_params(std::istream& in);
void write_params(std::ostream& out, const ScenarioParams& params);

std::string wallet_id(std::size_t index);
std::string token_id(std::size_t index);
std::string account_id(std::size_t wallet, std::size_t account);
std::string platform_id(std::size_t token);

/// One atomic trade. Ids are indices into the scenario's wallets/tokens.
struct Trade {
  Timestamp time;
  std::uint32_t wallet = 0;
  std::uint16_t token = 0;
  std::uint8_t account = 0;
  pnl::Side side = pnl::Side::buy;
  bool round_trip = false;
  Quantity quantity;
  Price price = 0.0;
};

struct TradeTape {
  ScenarioParams params;
  std::uint64_t seed = 0;
  /// Sorted by (time, wallet, token).
  std::vector<Trade> trades;
  /// End-of-day reference (median) price per token.
  std::vector<DailySeries<double>> reference;
  /// Anomalous price prints, all strictly above the token's cap.
  std::vector<PriceObservation> outliers;
  /// Per-token cap; empty when outlier_prob is zero.
  std::vector<double> caps;
};

TradeTape generate_scenario(const ScenarioParams& params, std::uint64_t seed);

struct DailyFiles {
  std::string balances;
  std::string prices;
  std::string caps;
};

/// End-of-day balances per token account (emitted only when they change)
/// plus price observations: one reference print per token-day, one print per
/// trade, and any outliers.
DailyFiles collapse_to_daily(const TradeTape& tape);

/// `kind,id,platform` mapping: every token to its platform, treasury wallets
/// to theirs.
std::string groups_csv(const TradeTape& tape);

struct OracleDay {
  Quantity quantity;
  Money realized_cum = 0.0;
  Money cost_basis = 0.0;
  Money unrealized = 0.0;
  Money total = 0.0;
};

struct OracleLedger {
  /// Realized PnL of each atomic sell, in trade order.
  std::vector<Money> sell_realized;
  /// Covers the whole scenario range; zero before the first trade.
  DailySeries<OracleDay> days;
  /// Sum over round trips of quantity x that token-day's observed price range.
  Money netting_bound = 0.0;
  bool has_round_trip = false;

  [[nodiscard]] const OracleDay& final_day() const { return days.values.back(); }
};

using OracleResult = std::map<LedgerKey, OracleLedger>;

/// Trade-level FIFO over an explicit lot queue, marked daily at `marks`.
OracleResult oracle_pnl(const TradeTape& tape, std::span<const DailySeries<double>> marks);

/// FIFO matching by consuming a queue of buy lots, one sell at a time.
std::vector<pnl::LotMatch> queue_fifo_match(std::span<const pnl::Lot> buys, std::span<const pnl::Lot> sells);

} // namespace agentpnl::synth
