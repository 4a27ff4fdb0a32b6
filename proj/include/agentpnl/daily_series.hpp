#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "agentpnl/model.hpp"

namespace agentpnl {

/// Dense run of one value per calendar day starting at `first`.
template <typename T>
struct DailySeries {
  Date first;
  std::vector<T> values;

  DailySeries() = default;
  DailySeries(Date start, std::vector<T> vals) : first(start), values(std::move(vals)) {}

  [[nodiscard]] bool empty() const { return values.empty(); }
  [[nodiscard]] std::size_t size() const { return values.size(); }
  /// Last covered day. Undefined for an empty series.
  [[nodiscard]] Date last() const { return first + static_cast<std::int32_t>(values.size()) - 1; }
  [[nodiscard]] bool covers(Date d) const { return !empty() && d >= first && d <= last(); }

  [[nodiscard]] const T& at(Date d) const {
    if (!covers(d)) {
      throw DomainError("date " + d.to_string() + " outside series range");
    }
    return values[static_cast<std::size_t>(d - first)];
  }

  /// Value at `d` with carry-forward past the end and `before` ahead of the start.
  [[nodiscard]] T value_or_carry(Date d, T before) const {
    if (empty() || d < first) {
      return before;
    }
    if (d > last()) {
      return values.back();
    }
    return values[static_cast<std::size_t>(d - first)];
  }

  friend bool operator==(const DailySeries&, const DailySeries&) = default;
};

} // namespace agentpnl
