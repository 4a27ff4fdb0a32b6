#include "agentpnl/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace agentpnl {

namespace {

bool parse_fixed_digits(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) {
    return false;
  }
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') {
      return false;
    }
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

std::optional<Date> parse_ymd_prefix(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
    return std::nullopt;
  }
  int y = 0;
  int m = 0;
  int d = 0;
  if (!parse_fixed_digits(text, 0, 4, y) || !parse_fixed_digits(text, 5, 2, m) ||
      !parse_fixed_digits(text, 8, 2, d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    return std::nullopt;
  }
  return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

// Decimal digits and exponent of the shortest round-trip representation:
// value = 0.d1d2d3... * 10^point_pos, digits has no leading zeros.
struct ShortestDecimal {
  bool negative = false;
  std::string digits;
  int point_pos = 0;
};

ShortestDecimal decompose(double value) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific);
  std::string_view s(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
  ShortestDecimal out;
  if (!s.empty() && s.front() == '-') {
    out.negative = true;
    s.remove_prefix(1);
  }
  const auto e_pos = s.find('e');
  const std::string_view mantissa = s.substr(0, e_pos);
  int exponent = 0;
  std::from_chars(s.data() + e_pos + 1 + (s[e_pos + 1] == '+' ? 1 : 0), s.data() + s.size(), exponent);
  for (char c : mantissa) {
    if (c != '.') {
      out.digits.push_back(c);
    }
  }
  while (out.digits.size() > 1 && out.digits.back() == '0') {
    out.digits.pop_back();
  }
  out.point_pos = exponent + 1;
  if (out.digits == "0") {
    out.point_pos = 1;
  }
  return out;
}

// Adds one unit in the last place of a string of decimal digits. Returns the
// carry out of the most significant digit.
bool increment_digits(std::string& digits) {
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it == '9') {
      *it = '0';
    } else {
      ++*it;
      return false;
    }
  }
  return true;
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    throw DomainError("invalid calendar date");
  }
  return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10) {
    return std::nullopt;
  }
  return parse_ymd_prefix(text);
}

Date Date::parse_or_throw(std::string_view text) {
  auto d = parse(text);
  if (!d) {
    throw ConfigError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  return *d;
}

std::string Date::to_string() const {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_}}};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return std::string(buf.data());
}

std::vector<Date> date_range(Date first, Date last) {
  if (first > last) {
    throw DomainError("invalid date range: " + first.to_string() + " > " + last.to_string());
  }
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(last - first) + 1);
  for (Date d = first; d <= last; d = d.next()) {
    out.push_back(d);
  }
  return out;
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  auto day = parse_ymd_prefix(text.substr(0, 10));
  int hh = 0;
  int mm = 0;
  int ss = 0;
  if (!day || !parse_fixed_digits(text, 11, 2, hh) || !parse_fixed_digits(text, 14, 2, mm) ||
      !parse_fixed_digits(text, 17, 2, ss) || hh > 23 || mm > 59 || ss > 59) {
    return std::nullopt;
  }
  return Timestamp{static_cast<std::int64_t>(day->days()) * 86400 + hh * 3600 + mm * 60 + ss};
}

Date Timestamp::date() const {
  auto days = seconds / 86400;
  if (seconds % 86400 < 0) {
    --days;
  }
  return Date{static_cast<std::int32_t>(days)};
}

std::string Timestamp::to_string() const {
  const Date d = date();
  const auto sod = seconds - static_cast<std::int64_t>(d.days()) * 86400;
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "T%02d:%02d:%02dZ", static_cast<int>(sod / 3600),
                static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
  return d.to_string() + buf.data();
}

std::optional<Quantity> Quantity::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return std::nullopt;
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > static_cast<std::size_t>(kScale) ||
      (dot != std::string_view::npos && frac.empty())) {
    return std::nullopt;
  }
  // 2^127 / 1e18 is about 1.7e20: keep at most 20 integer digits.
  if (whole.size() > 20) {
    return std::nullopt;
  }
  Raw value = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') {
      return std::nullopt;
    }
    value = value * 10 + (c - '0');
  }
  if (value > std::numeric_limits<std::int64_t>::max() * static_cast<Raw>(10)) {
    return std::nullopt;
  }
  Raw fraction = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') {
      return std::nullopt;
    }
    fraction = fraction * 10 + (c - '0');
  }
  for (std::size_t i = frac.size(); i < static_cast<std::size_t>(kScale); ++i) {
    fraction *= 10;
  }
  const Raw raw = value * kOne + fraction;
  return from_raw(negative ? -raw : raw);
}

double Quantity::to_double() const {
  const Raw whole = raw_ / kOne;
  const Raw frac = raw_ % kOne;
  return static_cast<double>(whole) + static_cast<double>(static_cast<std::int64_t>(frac)) / 1e18;
}

std::string Quantity::to_string() const {
  Raw v = raw_ < 0 ? -raw_ : raw_;
  const Raw whole = v / kOne;
  Raw frac = v % kOne;
  std::string w;
  Raw tmp = whole;
  do {
    w.push_back(static_cast<char>('0' + static_cast<int>(tmp % 10)));
    tmp /= 10;
  } while (tmp != 0);
  std::reverse(w.begin(), w.end());
  std::string out = raw_ < 0 ? "-" + w : w;
  if (frac != 0) {
    std::string f(static_cast<std::size_t>(kScale), '0');
    for (int i = kScale - 1; i >= 0; --i) {
      f[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(frac % 10));
      frac /= 10;
    }
    while (!f.empty() && f.back() == '0') {
      f.pop_back();
    }
    out += "." + f;
  }
  return out;
}

std::string format_money(Money value, int places) {
  if (places < 0) {
    throw DomainError("negative rounding places");
  }
  if (!std::isfinite(value)) {
    throw DomainError("non-finite money value");
  }
  const ShortestDecimal dec = decompose(value);
  const auto p = static_cast<std::size_t>(places);

  std::string int_part;
  std::string frac_part;
  if (dec.point_pos <= 0) {
    int_part = "0";
    frac_part = std::string(static_cast<std::size_t>(-dec.point_pos), '0') + dec.digits;
  } else if (static_cast<std::size_t>(dec.point_pos) >= dec.digits.size()) {
    int_part = dec.digits + std::string(static_cast<std::size_t>(dec.point_pos) - dec.digits.size(), '0');
  } else {
    int_part = dec.digits.substr(0, static_cast<std::size_t>(dec.point_pos));
    frac_part = dec.digits.substr(static_cast<std::size_t>(dec.point_pos));
  }

  if (frac_part.size() <= p) {
    frac_part.append(p - frac_part.size(), '0');
  } else {
    const std::string rest = frac_part.substr(p);
    frac_part.resize(p);
    bool round_up = false;
    if (rest[0] > '5') {
      round_up = true;
    } else if (rest[0] == '5') {
      const bool exact_half = rest.find_first_not_of('0', 1) == std::string::npos;
      if (!exact_half) {
        round_up = true;
      } else {
        const char last = p == 0 ? int_part.back() : frac_part.back();
        round_up = ((last - '0') % 2) != 0;
      }
    }
    if (round_up) {
      std::string all = int_part + frac_part;
      if (increment_digits(all)) {
        all.insert(all.begin(), '1');
      }
      int_part = all.substr(0, all.size() - p);
      frac_part = all.substr(all.size() - p);
    }
  }

  const bool is_zero = int_part.find_first_not_of('0') == std::string::npos &&
                       frac_part.find_first_not_of('0') == std::string::npos;
  std::string out = (dec.negative && !is_zero) ? "-" : "";
  out += int_part;
  if (p > 0) {
    out += "." + frac_part;
  }
  return out;
}

Money round_money(Money value, int places) {
  return *parse_double(format_money(value, places));
}

std::string format_shortest(double value) {
  if (value == 0.0) {
    return "0";
  }
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return std::nullopt;
  }
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

} // namespace agentpnl
