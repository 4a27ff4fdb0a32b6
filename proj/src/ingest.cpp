#include "agentpnl/ingest.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "csv.hpp"

namespace agentpnl::ingest {

using detail::CsvLines;
using detail::split_fields;

namespace {

// Reads the header line. Returns false for a zero-byte stream.
bool expect_header(CsvLines& lines, std::string& line, std::string_view header, const char* source) {
  if (!lines.next(line)) {
    return false;
  }
  if (line != header) {
    throw InputError(std::string(source) + ":1: missing or malformed header (expected '" +
                     std::string(header) + "')");
  }
  return true;
}

void check_columns(const std::vector<std::string_view>& fields, std::size_t expected, const char* source,
                   std::size_t line_no) {
  if (fields.size() != expected) {
    throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(expected) + " columns, found " + std::to_string(fields.size()));
  }
}

} // namespace

std::string Diagnostic::to_string() const {
  std::string out = source;
  if (line != 0) {
    out += ":" + std::to_string(line);
  }
  out += ": " + kind;
  if (!message.empty()) {
    out += ": " + message;
  }
  return out;
}

BalanceParse parse_balances(std::istream& in) {
  constexpr const char* kSource = "balances";
  BalanceParse result;
  CsvLines lines(in);
  std::string line;
  if (!expect_header(lines, line, kBalanceHeader, kSource)) {
    result.diagnostics.push_back({kSource, 0, "empty-file", "no header and no rows"});
    return result;
  }

  struct Row {
    BalanceRecord record;
    std::size_t line_no;
  };
  std::vector<Row> rows;
  std::vector<std::string_view> fields;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    ++result.rows_read;
    split_fields(line, fields);
    check_columns(fields, 5, kSource, lines.line_no());
    auto reject = [&](std::string kind, std::string msg) {
      ++result.rows_rejected;
      result.diagnostics.push_back({kSource, lines.line_no(), std::move(kind), std::move(msg)});
    };
    const auto date = Date::parse(fields[0]);
    if (!date) {
      reject("unparseable-row", "bad date '" + std::string(fields[0]) + "'");
      continue;
    }
    if (fields[1].empty() || fields[2].empty() || fields[3].empty()) {
      reject("unparseable-row", "empty wallet, account or token");
      continue;
    }
    const auto qty = Quantity::parse(fields[4]);
    if (!qty) {
      reject("unparseable-row", "bad balance '" + std::string(fields[4]) + "'");
      continue;
    }
    if (qty->is_negative()) {
      reject("negative-balance", "balance " + std::string(fields[4]) + " rejected");
      continue;
    }
    rows.push_back({BalanceRecord{*date, std::string(fields[1]), std::string(fields[2]),
                                  std::string(fields[3]), *qty},
                    lines.line_no()});
  }

  auto key_less = [](const Row& a, const Row& b) {
    return std::tie(a.record.wallet, a.record.account, a.record.token, a.record.date) <
           std::tie(b.record.wallet, b.record.account, b.record.token, b.record.date);
  };
  auto same_key = [](const Row& a, const Row& b) {
    return a.record.date == b.record.date && a.record.wallet == b.record.wallet &&
           a.record.account == b.record.account && a.record.token == b.record.token;
  };
  std::stable_sort(rows.begin(), rows.end(), key_less);

  result.records.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + 1 < rows.size() && same_key(rows[i], rows[i + 1])) {
      ++result.duplicates_collapsed;
      result.diagnostics.push_back({kSource, rows[i].line_no, "duplicate-key",
                                    "superseded by line " + std::to_string(rows[i + 1].line_no)});
      continue;
    }
    result.records.push_back(std::move(rows[i].record));
  }
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
            [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  return result;
}

PriceParse parse_prices(std::istream& in) {
  constexpr const char* kSource = "prices";
  PriceParse result;
  CsvLines lines(in);
  std::string line;
  if (!expect_header(lines, line, kPriceHeader, kSource)) {
    result.diagnostics.push_back({kSource, 0, "empty-file", "no header and no rows"});
    return result;
  }
  std::vector<std::string_view> fields;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    ++result.rows_read;
    split_fields(line, fields);
    check_columns(fields, 3, kSource, lines.line_no());
    auto reject = [&](std::string kind, std::string msg) {
      ++result.rows_rejected;
      result.diagnostics.push_back({kSource, lines.line_no(), std::move(kind), std::move(msg)});
    };
    const auto ts = Timestamp::parse(fields[0]);
    if (!ts) {
      reject("unparseable-row", "bad timestamp '" + std::string(fields[0]) + "'");
      continue;
    }
    if (fields[1].empty()) {
      reject("unparseable-row", "empty token");
      continue;
    }
    const auto price = parse_double(fields[2]);
    if (!price) {
      reject("unparseable-row", "bad price '" + std::string(fields[2]) + "'");
      continue;
    }
    if (*price < 0.0) {
      reject("negative-price", "price " + std::string(fields[2]) + " rejected");
      continue;
    }
    result.observations.push_back({*ts, std::string(fields[1]), *price});
  }
  std::stable_sort(result.observations.begin(), result.observations.end(),
                   [](const PriceObservation& a, const PriceObservation& b) {
                     return std::tie(a.token, a.timestamp) < std::tie(b.token, b.timestamp);
                   });
  return result;
}

CapTable parse_caps(std::istream& in) {
  constexpr const char* kSource = "caps";
  CapTable caps;
  CsvLines lines(in);
  std::string line;
  if (!expect_header(lines, line, kCapHeader, kSource)) {
    return caps;
  }
  std::vector<std::string_view> fields;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    split_fields(line, fields);
    check_columns(fields, 2, kSource, lines.line_no());
    const auto where = std::string(kSource) + ":" + std::to_string(lines.line_no()) + ": ";
    if (fields[0].empty()) {
      throw InputError(where + "empty token");
    }
    const auto cap = parse_double(fields[1]);
    if (!cap) {
      throw InputError(where + "bad cap '" + std::string(fields[1]) + "'");
    }
    if (*cap <= 0.0) {
      throw InputError(where + "cap must be positive");
    }
    if (!caps.emplace(std::string(fields[0]), *cap).second) {
      throw InputError(where + "duplicate cap for token '" + std::string(fields[0]) + "'");
    }
  }
  return caps;
}

DatasetSummary validate_dataset(const BalanceParse& balances, const PriceParse& prices,
                                const CapTable& /*caps*/) {
  DatasetSummary s;
  s.n_balance_records = balances.records.size();
  s.n_price_observations = prices.observations.size();

  std::set<std::string_view> wallets;
  std::set<std::pair<std::string_view, std::string_view>> accounts;
  std::set<std::string_view> tokens;
  for (const auto& r : balances.records) {
    wallets.insert(r.wallet);
    accounts.emplace(r.wallet, r.account);
    tokens.insert(r.token);
    if (!s.balance_span) {
      s.balance_span = DateSpan{r.date, r.date};
    } else {
      s.balance_span->first = std::min(s.balance_span->first, r.date);
      s.balance_span->last = std::max(s.balance_span->last, r.date);
    }
  }
  s.n_wallets = wallets.size();
  s.n_accounts = accounts.size();
  s.n_tokens = tokens.size();

  std::set<std::string_view> priced;
  for (const auto& o : prices.observations) {
    priced.insert(o.token);
    const Date d = o.timestamp.date();
    if (!s.price_span) {
      s.price_span = DateSpan{d, d};
    } else {
      s.price_span->first = std::min(s.price_span->first, d);
      s.price_span->last = std::max(s.price_span->last, d);
    }
  }

  s.diagnostics = balances.diagnostics;
  s.diagnostics.insert(s.diagnostics.end(), prices.diagnostics.begin(), prices.diagnostics.end());
  for (auto t : tokens) {
    if (!priced.contains(t)) {
      s.unpriced_tokens.emplace_back(t);
      s.diagnostics.push_back({"dataset", 0, "unpriced-token",
                               "token '" + std::string(t) + "' has balances but no price observations"});
    }
  }
  if (s.n_wallets == 0) {
    s.diagnostics.push_back({"dataset", 0, "no-wallets", "balance table contains zero wallets"});
  }
  return s;
}

void write_balances(std::ostream& out, std::span<const BalanceRecord> records) {
  out << kBalanceHeader << '\n';
  for (const auto& r : records) {
    out << r.date.to_string() << ',' << r.wallet << ',' << r.account << ',' << r.token << ','
        << r.balance.to_string() << '\n';
  }
}

void write_prices(std::ostream& out, std::span<const PriceObservation> observations) {
  out << kPriceHeader << '\n';
  for (const auto& o : observations) {
    out << o.timestamp.to_string() << ',' << o.token << ',' << format_shortest(o.price) << '\n';
  }
}

void write_caps(std::ostream& out, const CapTable& caps) {
  out << kCapHeader << '\n';
  for (const auto& [token, cap] : caps) {
    out << token << ',' << format_shortest(cap) << '\n';
  }
}

} // namespace agentpnl::ingest
