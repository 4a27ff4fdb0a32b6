#include <set>

#include "agentpnl/ingest.hpp"
#include "agentpnl/synth.hpp"
#include "support.hpp"

using namespace agentpnl;
using namespace agentpnl::synth;
using testing::q;

namespace {

ScenarioParams tiny(std::int32_t days = 3) {
  ScenarioParams p;
  p.wallets = 1;
  p.tokens = 1;
  p.days = days;
  p.treasury_wallets = false;
  return p;
}

TradeTape hand_tape(std::int32_t days, std::vector<Trade> trades, std::vector<double> ref) {
  TradeTape tape;
  tape.params = tiny(days);
  tape.trades = std::move(trades);
  tape.reference.push_back({tape.params.start, std::move(ref)});
  return tape;
}

Trade trade(int day, int hour, pnl::Side side, std::int64_t qty, double price) {
  const Date date = Date::from_ymd(2024, 11, 1) + (day - 1);
  return {Timestamp{static_cast<std::int64_t>(date.days()) * 86400 + hour * 3600}, 0, 0, 0, side, false, q(qty), price};
}

ingest::BalanceParse parse_balance_text(const std::string& text) {
  auto in = testing::stream(text);
  return ingest::parse_balances(in);
}

} // namespace

TEST_CASE("generate_scenario") {
  SUBCASE("zero intensity gives an empty tape") {
    ScenarioParams p;
    p.intensity = 0.0;
    CHECK(generate_scenario(p, 1).trades.empty());
  }
  SUBCASE("same seed, same tape") {
    ScenarioParams p;
    p.round_trip_prob = 0.3;
    p.outlier_prob = 0.05;
    const auto a = generate_scenario(p, 99);
    const auto b = generate_scenario(p, 99);
    REQUIRE(a.trades.size() == b.trades.size());
    for (std::size_t i = 0; i < a.trades.size(); ++i) {
      CHECK(a.trades[i].time == b.trades[i].time);
      CHECK(a.trades[i].quantity == b.trades[i].quantity);
      CHECK(a.trades[i].price == b.trades[i].price);
    }
    CHECK(collapse_to_daily(a).prices == collapse_to_daily(b).prices);
    CHECK(generate_scenario(p, 100).trades.size() != 0);
  }
  SUBCASE("no round trips means one direction per wallet-token-day") {
    ScenarioParams p;
    p.wallets = 300;
    p.intensity = 0.5;
    std::map<std::tuple<std::uint32_t, std::uint16_t, std::int32_t>, std::set<pnl::Side>> sides;
    for (const auto& t : generate_scenario(p, 5).trades) {
      sides[{t.wallet, t.token, t.time.date().days()}].insert(t.side);
    }
    for (const auto& [key, s] : sides) {
      CHECK(s.size() == 1);
    }
  }
  SUBCASE("balances never go negative") {
    ScenarioParams p;
    p.round_trip_prob = 0.5;
    std::map<std::tuple<std::uint32_t, std::uint16_t, std::uint8_t>, Quantity> held;
    for (const auto& t : generate_scenario(p, 8).trades) {
      auto& h = held[{t.wallet, t.token, t.account}];
      h = t.side == pnl::Side::buy ? h + t.quantity : h - t.quantity;
      CHECK_FALSE(h.is_negative());
    }
  }
  SUBCASE("trades are time ordered and inside the scenario") {
    ScenarioParams p;
    const auto tape = generate_scenario(p, 3);
    for (std::size_t i = 1; i < tape.trades.size(); ++i) {
      CHECK(tape.trades[i - 1].time <= tape.trades[i].time);
    }
    for (const auto& t : tape.trades) {
      CHECK(t.time.date() >= p.start);
      CHECK(t.time.date() <= p.end());
    }
  }
}

TEST_CASE("scenario parameters") {
  auto in = testing::stream("# comment\nwallets=5\n\nvolatility=0\nstart=2025-01-01\ntreasury_wallets=false\n");
  const auto p = parse_params(in);
  CHECK(p.wallets == 5);
  CHECK(p.volatility == 0.0);
  CHECK(p.start == Date::from_ymd(2025, 1, 1));
  CHECK_FALSE(p.treasury_wallets);

  std::ostringstream out;
  write_params(out, p);
  auto back = testing::stream(out.str());
  const auto again = parse_params(back);
  CHECK(again.wallets == p.wallets);
  CHECK(again.start == p.start);

  auto unknown = testing::stream("wallet=5\n");
  CHECK_THROWS_AS(parse_params(unknown), ConfigError);
  auto bad = testing::stream("round_trip_prob=1.5\n");
  CHECK_THROWS_AS(parse_params(bad), ConfigError);
  auto zero = testing::stream("tokens=0\n");
  CHECK_THROWS_AS(parse_params(zero), ConfigError);
  auto junk = testing::stream("days=ten\n");
  CHECK_THROWS_AS(parse_params(junk), ConfigError);
}

TEST_CASE("collapse_to_daily") {
  SUBCASE("one buy") {
    const auto f = collapse_to_daily(hand_tape(1, {trade(1, 10, pnl::Side::buy, 5, 2)}, {2}));
    const auto p = parse_balance_text(f.balances);
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].date == testing::d(1));
    CHECK(p.records[0].balance == q(5));
  }
  SUBCASE("same-day round trip leaves no record") {
    const auto f = collapse_to_daily(
        hand_tape(1, {trade(1, 10, pnl::Side::buy, 5, 2), trade(1, 11, pnl::Side::sell, 5, 2)}, {2}));
    CHECK(parse_balance_text(f.balances).records.empty());
  }
  SUBCASE("records only on change days") {
    const auto f = collapse_to_daily(
        hand_tape(3, {trade(1, 10, pnl::Side::buy, 5, 2), trade(3, 11, pnl::Side::sell, 2, 2)}, {2, 2, 2}));
    const auto p = parse_balance_text(f.balances);
    REQUIRE(p.records.size() == 2);
    CHECK(p.records[0].date == testing::d(1));
    CHECK(p.records[0].balance == q(5));
    CHECK(p.records[1].date == testing::d(3));
    CHECK(p.records[1].balance == q(3));
  }
  SUBCASE("generated files parse without diagnostics") {
    ScenarioParams p;
    p.round_trip_prob = 0.4;
    p.outlier_prob = 0.05;
    const auto tape = generate_scenario(p, 12);
    const auto f = collapse_to_daily(tape);
    const auto bal = parse_balance_text(f.balances);
    auto pin = testing::stream(f.prices);
    const auto prices = ingest::parse_prices(pin);
    auto cin = testing::stream(f.caps);
    const auto caps = ingest::parse_caps(cin);
    CHECK(bal.diagnostics.empty());
    CHECK(prices.diagnostics.empty());
    CHECK(bal.rows_rejected == 0);
    CHECK(prices.rows_rejected == 0);
    CHECK(caps.size() == p.tokens);
    CHECK(ingest::validate_dataset(bal, prices, caps).diagnostics.empty());
  }
}

TEST_CASE("oracle_pnl") {
  SUBCASE("two buys and a partial sell") {
    const auto tape = hand_tape(3,
                                {trade(1, 1, pnl::Side::buy, 10, 1), trade(2, 1, pnl::Side::buy, 5, 2),
                                 trade(3, 1, pnl::Side::sell, 12, 3)},
                                {1, 2, 3});
    const auto o = oracle_pnl(tape, tape.reference);
    REQUIRE(o.size() == 1);
    const auto& l = o.begin()->second;
    CHECK(l.sell_realized == std::vector<double>{22});
    CHECK(l.final_day().realized_cum == 22);
    CHECK(l.final_day().cost_basis == 6);
    CHECK(l.final_day().total == 25);
  }
  SUBCASE("no sells") {
    const auto tape = hand_tape(2, {trade(1, 1, pnl::Side::buy, 10, 1)}, {1, 4});
    const auto& l = oracle_pnl(tape, tape.reference).begin()->second;
    CHECK(l.final_day().realized_cum == 0);
    CHECK(l.final_day().total == 30);
  }
  SUBCASE("round trip at one price") {
    const auto tape =
        hand_tape(1, {trade(1, 1, pnl::Side::buy, 10, 4), trade(1, 2, pnl::Side::sell, 10, 4)}, {4});
    const auto& l = oracle_pnl(tape, tape.reference).begin()->second;
    CHECK(l.final_day().total == 0);
  }
}
