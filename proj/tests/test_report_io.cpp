#include <json.hpp>

#include "agentpnl/pipeline.hpp"
#include "agentpnl/report_io.hpp"
#include "support.hpp"

using namespace agentpnl;
using namespace agentpnl::report_io;
using testing::d;
using testing::stream;

TEST_CASE("JsonWriter") {
  JsonWriter w;
  w.begin_object();
  w.key("a").money(1.5);
  w.key("b").number(0.1);
  w.key("c").begin_array().integer(3).null().string("x\"y").end_array();
  w.key("e").begin_array().end_array();
  w.end_object();
  const auto j = nlohmann::json::parse(w.str());
  CHECK(j["a"] == 1.5);
  CHECK(j["b"] == 0.1);
  CHECK(j["c"][0] == 3);
  CHECK(j["c"][1].is_null());
  CHECK(j["c"][2] == "x\"y");
  CHECK(j["e"].empty());
  CHECK(w.str().find("1.500000") != std::string::npos);
}

TEST_CASE("summary.json has exactly the table columns and reads back") {
  analytics::SummaryStats s{3, 5.0 / 3.0, 0, -5, 10, 1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::ostringstream out;
  write_summary_json(out, d(30), {{"P1", s}});
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["snapshot_date"] == "2024-11-30");
  std::vector<std::string> keys;
  for (const auto& [k, v] : j["platforms"][0].items()) {
    keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"max", "mean", "median", "min", "pct_loss", "pct_profitable", "pct_zero",
                                         "platform", "users"});
  auto in = stream(out.str());
  const auto back = read_summary_json(in);
  CHECK(back.snapshot == d(30));
  REQUIRE(back.platforms.size() == 1);
  CHECK(back.platforms[0].platform == "P1");
  CHECK(back.platforms[0].stats.users == 3);
  CHECK(back.platforms[0].stats.mean == doctest::Approx(5.0 / 3.0).epsilon(1e-6));
  CHECK(back.platforms[0].stats.pct_zero == 1.0 / 3);
}

TEST_CASE("concentration.json") {
  analytics::ConcentrationReport none{};
  none.top_fraction = 0.01;
  analytics::ConcentrationReport some{4, 0.25, 1, 100, 116, 100.0 / 116.0};
  std::ostringstream out;
  write_concentration_json(out, 0.25, some, {{"P1", some}, {"P2", none}});
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["top_fraction"] == 0.25);
  CHECK(j["overall"]["top_count"] == 1);
  CHECK(j["platforms"][0]["top_share"] == 100.0 / 116.0);
  CHECK(j["platforms"][1]["top_share"].is_null());
}

TEST_CASE("dist.csv round-trips") {
  const analytics::Buckets b({-10, 0, 10});
  std::vector<DailySeries<Money>> w{{d(1), {5, -1}}, {d(1), {-5, 0}}, {d(2), {0}}};
  const auto dates = date_range(d(1), d(2));
  const auto m = analytics::bucket_distribution(w, b, dates);
  std::ostringstream out;
  write_dist_csv(out, {{"P1", m}});
  CHECK(out.str().rfind(std::string(kDistHeader) + "\n", 0) == 0);
  auto in = stream(out.str());
  const auto rows = read_dist_csv(in);
  CHECK(rows.size() == 2 * b.count());
  double day2 = 0.0;
  for (const auto& r : rows) {
    CHECK(r.platform == "P1");
    if (r.date == d(2)) {
      day2 += r.share;
    }
  }
  CHECK(day2 == doctest::Approx(1.0));
  CHECK(rows[0].bucket == "(-inf..-10]");
}

TEST_CASE("benchmark.json") {
  std::map<std::string, grid::PriceSeries> prices{{"TOK", {d(1), {100, 50, 7}}}, {"SOL", {d(1), {10, 8, 6}}}};
  std::ostringstream out;
  write_benchmark_json(out, analytics::benchmark_report(prices, "SOL"));
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["benchmark"]["token"] == "SOL");
  CHECK(j["benchmark"]["decline_from_ath"].get<double>() == doctest::Approx(0.4));
  CHECK(j["tokens"][0]["decline_from_ath"].get<double>() == doctest::Approx(0.93));
  CHECK(j["tokens"][0]["ath_date"] == "2024-11-01");
  CHECK(j["average_decline"].get<double>() == doctest::Approx(0.93));
}

TEST_CASE("treasury.csv and mc_to_aum.json") {
  analytics::PnlSeries t{d(1), {0, 1}, {2, 3}, {2, 4}, {10, 20}};
  std::ostringstream out;
  write_treasury_csv(out, {{"P1", t}});
  CHECK(out.str() == std::string(kTreasuryHeader) +
                         "\nP1,2024-11-01,0.000000,2.000000,2.000000,10.000000\n"
                         "P1,2024-11-02,1.000000,3.000000,4.000000,20.000000\n");
  std::ostringstream ratio;
  write_mc_to_aum_json(ratio, {{"P1", analytics::mc_to_aum({d(1), {5e7, 100}}, t.market_value_series())}});
  const auto j = nlohmann::json::parse(ratio.str());
  CHECK(j["platforms"][0]["peak_ratio"] == 5e6);
  CHECK(j["platforms"][0]["peak_date"] == "2024-11-01");
}

TEST_CASE("read_market_caps") {
  auto in = stream("date,platform,market_cap\n2024-11-01,P1,10\n2024-11-02,P1,20\n2024-11-01,P2,5\n");
  const auto m = read_market_caps(in);
  CHECK(m.at("P1").values == std::vector<double>{10, 20});
  CHECK(m.at("P2").first == d(1));
  auto gap = stream("date,platform,market_cap\n2024-11-01,P1,10\n2024-11-03,P1,20\n");
  CHECK_THROWS_AS(read_market_caps(gap), InputError);
  auto bad = stream("date,platform,mcap\n");
  CHECK_THROWS_AS(read_market_caps(bad), InputError);
}

TEST_CASE("ledgers.csv reads back") {
  auto in = stream(std::string(pipeline::kLedgerHeader) +
                   "\nW1,T1,2024-11-03,3,3,6.000000,22.000000,3.000000,25.000000\n");
  const auto rows = read_ledgers_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].total == 25);
  CHECK(rows[0].quantity == testing::q(3));
  auto bad = stream(std::string(pipeline::kLedgerHeader) + "\nW1,T1,2024-11-03,3,3,6\n");
  CHECK_THROWS_AS(read_ledgers_csv(bad), InputError);
}
