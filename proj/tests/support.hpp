#pragma once

#include <algorithm>
#include <cmath>
#include <ctime>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "agentpnl/daily_series.hpp"
#include "agentpnl/model.hpp"

namespace testing {

using agentpnl::Date;
using agentpnl::Quantity;

inline Date day(int y, unsigned m, unsigned d) { return Date::from_ymd(y, m, d); }

// 2024-11-01 and the following days, for short hand-written ledgers.
inline Date d(int n) { return Date::from_ymd(2024, 11, 1) + (n - 1); }

inline Quantity q(const char* text) {
  auto v = Quantity::parse(text);
  REQUIRE(v.has_value());
  return *v;
}

inline Quantity q(std::int64_t whole) { return Quantity::from_integer(whole); }

inline std::istringstream stream(const std::string& text) { return std::istringstream(text); }

// Calendar oracle built on the C library rather than std::chrono.
inline std::string calendar_oracle(Date date) {
  std::time_t t = static_cast<std::time_t>(date.days()) * 86400;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

// Latest value with date <= target, by linear scan.
template <typename T>
std::optional<T> latest_at_or_before(const std::vector<std::pair<Date, T>>& points, Date target) {
  std::optional<T> out;
  Date best{};
  for (const auto& [date, value] : points) {
    if (date <= target && (!out || date >= best)) {
      out = value;
      best = date;
    }
  }
  return out;
}

inline double median_by_sort(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Exhaustive O(n^2) scan over every (peak, trough) pair.
inline double drawdown_by_pairs(const std::vector<double>& v) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i; j < v.size(); ++j) {
      best = std::max(best, (v[i] - v[j]) / v[i]);
    }
  }
  return best;
}

template <typename T>
std::vector<T> values(const agentpnl::DailySeries<T>& s) {
  return s.values;
}

} // namespace testing
