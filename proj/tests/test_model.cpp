#include <random>

#include "agentpnl/model.hpp"
#include "support.hpp"

using namespace agentpnl;
using testing::day;

TEST_CASE("date_range") {
  SUBCASE("single day") {
    const auto r = date_range(day(2024, 11, 1), day(2024, 11, 1));
    REQUIRE(r.size() == 1);
    CHECK(r[0].to_string() == "2024-11-01");
  }
  SUBCASE("three consecutive days") {
    const auto r = date_range(day(2024, 11, 1), day(2024, 11, 3));
    REQUIRE(r.size() == 3);
    CHECK(r[1].to_string() == "2024-11-02");
    CHECK(r[2].to_string() == "2024-11-03");
  }
  SUBCASE("crosses a year boundary") {
    const auto r = date_range(day(2024, 12, 30), day(2025, 1, 2));
    REQUIRE(r.size() == 4);
    std::vector<std::string> got;
    for (auto x : r) {
      got.push_back(x.to_string());
      CHECK(x.to_string() == testing::calendar_oracle(x));
    }
    CHECK(got == std::vector<std::string>{"2024-12-30", "2024-12-31", "2025-01-01", "2025-01-02"});
  }
  SUBCASE("reversed bounds") { CHECK_THROWS_AS(date_range(day(2024, 11, 2), day(2024, 11, 1)), DomainError); }
}

TEST_CASE("date_range length and calendar agree with the C library over random spans") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> start(0, 30000);
  std::uniform_int_distribution<int> len(0, 800);
  for (int i = 0; i < 300; ++i) {
    const Date a{start(rng)};
    const Date b = a + len(rng);
    const auto r = date_range(a, b);
    CHECK(static_cast<std::int32_t>(r.size()) == (b - a) + 1);
    CHECK(r.front().to_string() == testing::calendar_oracle(r.front()));
    CHECK(r.back().to_string() == testing::calendar_oracle(r.back()));
    CHECK(Date::parse(r.back().to_string()) == r.back());
  }
}

TEST_CASE("Date::parse is strict") {
  CHECK(Date::parse("2024-02-29").has_value());
  CHECK_FALSE(Date::parse("2023-02-29").has_value());
  CHECK_FALSE(Date::parse("2024-13-01").has_value());
  CHECK_FALSE(Date::parse("2024-1-01").has_value());
  CHECK_FALSE(Date::parse("2024-01-01 ").has_value());
  CHECK_FALSE(Date::parse("").has_value());
  CHECK_THROWS_AS(Date::parse_or_throw("yesterday"), ConfigError);
}

TEST_CASE("Timestamp parse and day bucket") {
  auto t = Timestamp::parse("2024-11-01T13:00:00Z");
  REQUIRE(t);
  CHECK(t->date() == day(2024, 11, 1));
  CHECK(t->to_string() == "2024-11-01T13:00:00Z");
  auto late = Timestamp::parse("2024-11-01T23:59:59Z");
  REQUIRE(late);
  CHECK(late->date() == day(2024, 11, 1));
  CHECK_FALSE(Timestamp::parse("2024-11-01T13:00:00").has_value());
  CHECK_FALSE(Timestamp::parse("2024-11-01T24:00:00Z").has_value());
  CHECK_FALSE(Timestamp::parse("2024-11-01 13:00:00Z").has_value());
}

TEST_CASE("round_money") {
  CHECK(round_money(2.5e-6, 6) == 0.000002);
  CHECK(round_money(1.0, 6) == 1.0);
  CHECK(round_money(-0.1234565, 6) == -0.123456);
  CHECK(round_money(3.5e-6, 6) == 0.000004);
  CHECK(round_money(0.5, 0) == 0.0);
  CHECK(round_money(1.5, 0) == 2.0);
  CHECK(format_money(2.5e-6) == "0.000002");
  CHECK(format_money(-0.1234565) == "-0.123456");
  CHECK(format_money(-1e-9) == "0.000000");
  CHECK(format_money(25.0) == "25.000000");
}

TEST_CASE("round_money is idempotent") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 5000; ++i) {
    const double x = u(rng);
    const double once = round_money(x, 6);
    CHECK(round_money(once, 6) == once);
    CHECK(std::abs(once - x) <= 5e-7 + 1e-9);
  }
}

TEST_CASE("Quantity parse and print") {
  CHECK(testing::q("5").raw() == 5 * Quantity::kOne);
  CHECK(testing::q("0.000000000000000001").raw() == 1);
  CHECK(testing::q("-12.5").to_string() == "-12.5");
  CHECK(testing::q("7.000").to_string() == "7");
  CHECK(testing::q("0.1").to_string() == "0.1");
  CHECK_FALSE(Quantity::parse("5.").has_value());
  CHECK_FALSE(Quantity::parse(".5").has_value());
  CHECK_FALSE(Quantity::parse("1e3").has_value());
  CHECK_FALSE(Quantity::parse("0.0000000000000000001").has_value());
  CHECK_FALSE(Quantity::parse("1,000").has_value());
  CHECK_FALSE(Quantity::parse("").has_value());
  CHECK_FALSE(Quantity::parse("-").has_value());
}

TEST_CASE("Quantity arithmetic is exact") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> whole(0, 1'000'000'000);
  std::uniform_int_distribution<std::int64_t> frac(0, 999'999'999'999'999'999);
  for (int i = 0; i < 10000; ++i) {
    const auto a = Quantity::from_raw(static_cast<Quantity::Raw>(whole(rng)) * Quantity::kOne + frac(rng));
    const auto b = Quantity::from_raw(static_cast<Quantity::Raw>(whole(rng)) * Quantity::kOne + frac(rng));
    CHECK(a + b - b == a);
    CHECK(Quantity::parse(a.to_string()) == a);
    CHECK(Quantity::parse((-b).to_string()) == -b);
  }
  CHECK(testing::q("0.1") + testing::q("0.2") == testing::q("0.3"));
}

TEST_CASE("format_shortest round-trips") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e9, 1e9);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    CHECK(parse_double(format_shortest(x)) == x);
  }
  CHECK(format_shortest(0.1) == "0.1");
  CHECK(format_shortest(2.0) == "2");
  CHECK_FALSE(parse_double("nan").has_value());
  CHECK_FALSE(parse_double("1.5x").has_value());
}
