#include "agentpnl/report_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "agentpnl/pipeline.hpp"
#include "csv.hpp"

namespace agentpnl::report_io {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
    case '"':
      out += "\\\"";
      break;
    case '\\':
      out += "\\\\";
      break;
    case '\n':
      out += "\\n";
      break;
    default:
      if (static_cast<unsigned char>(c) < 0x20) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\u%04x", c);
        out += buf;
      } else {
        out += c;
      }
    }
  }
  out += '"';
  return out;
}

void concentration_fields(JsonWriter& w, const analytics::ConcentrationReport& r) {
  w.key("winners").integer(r.winners);
  w.key("top_count").integer(r.top_count);
  w.key("top_sum").money(r.top_sum);
  w.key("winner_sum").money(r.winner_sum);
  w.key("top_share");
  if (r.top_share) {
    w.number(*r.top_share);
  } else {
    w.null();
  }
}

void token_fields(JsonWriter& w, const analytics::TokenBenchmark& t) {
  w.key("token").string(t.token);
  w.key("first_date").string(t.first.to_string());
  w.key("last_date").string(t.last.to_string());
  w.key("max_drawdown").number(t.max_drawdown);
  w.key("decline_from_ath").number(t.decline_from_ath);
  w.key("ath_date").string(t.ath_date.to_string());
}

[[noreturn]] void bad_line(const char* source, std::size_t line, const std::string& what) {
  throw InputError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double field_double(std::string_view v, const char* source, std::size_t line) {
  auto d = parse_double(v);
  if (!d) {
    bad_line(source, line, "bad number '" + std::string(v) + "'");
  }
  return *d;
}

Date field_date(std::string_view v, const char* source, std::size_t line) {
  auto d = Date::parse(v);
  if (!d) {
    bad_line(source, line, "bad date '" + std::string(v) + "'");
  }
  return *d;
}

} // namespace

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(has_items_.size() * 2, ' ');
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!has_items_.empty()) {
    if (has_items_.back()) {
      out_ += ',';
    }
    has_items_.back() = true;
    newline();
  }
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool had = has_items_.back();
  has_items_.pop_back();
  if (had) {
    newline();
  }
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  const bool had = has_items_.back();
  has_items_.pop_back();
  if (had) {
    newline();
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  before_value();
  out_ += escape(k);
  out_ += ": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::string(std::string_view v) {
  before_value();
  out_ += escape(v);
  return *this;
}

JsonWriter& JsonWriter::money(Money v) {
  before_value();
  out_ += format_money(v);
  return *this;
}

JsonWriter& JsonWriter::number(double v) {
  before_value();
  out_ += format_shortest(v);
  return *this;
}

JsonWriter& JsonWriter::integer(std::uint64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

void write_summary_json(std::ostream& out, Date snapshot,
                        const std::map<std::string, analytics::SummaryStats>& platforms) {
  JsonWriter w;
  w.begin_object();
  w.key("snapshot_date").string(snapshot.to_string());
  w.key("platforms").begin_array();
  for (const auto& [platform, s] : platforms) {
    w.begin_object();
    w.key("platform").string(platform);
    w.key("users").integer(s.users);
    w.key("mean").money(s.mean);
    w.key("median").money(s.median);
    w.key("min").money(s.min);
    w.key("max").money(s.max);
    w.key("pct_profitable").number(s.pct_profitable);
    w.key("pct_loss").number(s.pct_loss);
    w.key("pct_zero").number(s.pct_zero);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  out << w.str();
}

void write_concentration_json(std::ostream& out, double top_fraction, const analytics::ConcentrationReport& overall,
                              const std::map<std::string, analytics::ConcentrationReport>& platforms) {
  JsonWriter w;
  w.begin_object();
  w.key("top_fraction").number(top_fraction);
  w.key("overall").begin_object();
  concentration_fields(w, overall);
  w.end_object();
  w.key("platforms").begin_array();
  for (const auto& [platform, r] : platforms) {
    w.begin_object();
    w.key("platform").string(platform);
    concentration_fields(w, r);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  out << w.str();
}

void write_dist_csv(std::ostream& out, const std::map<std::string, analytics::BucketMatrix>& platforms) {
  out << kDistHeader << '\n';
  std::string buf;
  for (const auto& [platform, m] : platforms) {
    for (std::size_t d = 0; d < m.dates.size(); ++d) {
      const std::string date = m.dates[d].to_string();
      buf.clear();
      for (std::size_t b = 0; b < m.labels.size(); ++b) {
        buf += platform;
        buf += ',';
        buf += date;
        buf += ',';
        buf += m.labels[b];
        buf += ',';
        buf += format_shortest(m.shares[d][b]);
        buf += '\n';
      }
      out << buf;
    }
  }
}

void write_benchmark_json(std::ostream& out, const analytics::BenchmarkReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("benchmark").begin_object();
  token_fields(w, report.benchmark);
  w.end_object();
  w.key("average_decline");
  if (report.average_decline) {
    w.number(*report.average_decline);
  } else {
    w.null();
  }
  w.key("tokens").begin_array();
  for (const auto& t : report.tokens) {
    w.begin_object();
    token_fields(w, t);
    w.end_object();
  }
  w.end_array();
  w.key("skipped").begin_array();
  for (const auto& s : report.skipped) {
    w.string(s);
  }
  w.end_array();
  w.end_object();
  out << w.str();
}

void write_treasury_csv(std::ostream& out, const std::map<std::string, analytics::PnlSeries>& treasuries) {
  out << kTreasuryHeader << '\n';
  for (const auto& [platform, s] : treasuries) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << platform << ',' << (s.first + static_cast<std::int32_t>(i)).to_string() << ','
          << format_money(s.realized[i]) << ',' << format_money(s.unrealized[i]) << ',' << format_money(s.total[i])
          << ',' << format_money(s.market_value[i]) << '\n';
    }
  }
}

void write_mc_to_aum_json(std::ostream& out, const std::map<std::string, analytics::McToAum>& ratios) {
  JsonWriter w;
  w.begin_object();
  w.key("platforms").begin_array();
  for (const auto& [platform, r] : ratios) {
    w.begin_object();
    w.key("platform").string(platform);
    w.key("peak_ratio").number(r.peak_ratio);
    w.key("peak_date").string(r.peak_date.to_string());
    w.key("days").integer(r.ratios.size());
    w.key("skipped_days").begin_array();
    for (const auto d : r.skipped_days) {
      w.string(d.to_string());
    }
    w.end_array();
    w.key("ratios").begin_array();
    for (const auto& [d, ratio] : r.ratios) {
      w.begin_object();
      w.key("date").string(d.to_string());
      w.key("ratio").number(ratio);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  out << w.str();
}

std::vector<LedgerRow> read_ledgers_csv(std::istream& in) {
  constexpr const char* kSource = "ledgers";
  detail::CsvLines lines(in);
  std::string line;
  if (!lines.next(line) || line != pipeline::kLedgerHeader) {
    bad_line(kSource, 1, "missing or malformed header");
  }
  std::vector<LedgerRow> rows;
  std::vector<std::string_view> f;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    detail::split_fields(line, f);
    const auto n = lines.line_no();
    if (f.size() != 9) {
      bad_line(kSource, n, "expected 9 columns");
    }
    LedgerRow r;
    r.wallet = f[0];
    r.token = f[1];
    r.date = field_date(f[2], kSource, n);
    auto q = Quantity::parse(f[3]);
    if (!q) {
      bad_line(kSource, n, "bad quantity");
    }
    r.quantity = *q;
    r.price = field_double(f[4], kSource, n);
    r.cost_basis = field_double(f[5], kSource, n);
    r.realized_cum = field_double(f[6], kSource, n);
    r.unrealized = field_double(f[7], kSource, n);
    r.total = field_double(f[8], kSource, n);
    rows.push_back(std::move(r));
  }
  return rows;
}

SummaryFile read_summary_json(std::istream& in) {
  SummaryFile file;
  try {
    const auto j = nlohmann::json::parse(in);
    file.snapshot = Date::parse_or_throw(j.at("snapshot_date").get<std::string>());
    for (const auto& p : j.at("platforms")) {
      PlatformSummary s;
      s.platform = p.at("platform").get<std::string>();
      s.stats.users = p.at("users").get<std::size_t>();
      s.stats.mean = p.at("mean").get<double>();
      s.stats.median = p.at("median").get<double>();
      s.stats.min = p.at("min").get<double>();
      s.stats.max = p.at("max").get<double>();
      s.stats.pct_profitable = p.at("pct_profitable").get<double>();
      s.stats.pct_loss = p.at("pct_loss").get<double>();
      s.stats.pct_zero = p.at("pct_zero").get<double>();
      file.platforms.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("summary: ") + e.what());
  }
  return file;
}

std::vector<DistRow> read_dist_csv(std::istream& in) {
  constexpr const char* kSource = "dist";
  detail::CsvLines lines(in);
  std::string line;
  if (!lines.next(line) || line != kDistHeader) {
    bad_line(kSource, 1, "missing or malformed header");
  }
  std::vector<DistRow> rows;
  std::vector<std::string_view> f;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    detail::split_fields(line, f);
    const auto n = lines.line_no();
    if (f.size() != 4) {
      bad_line(kSource, n, "expected 4 columns");
    }
    rows.push_back({std::string(f[0]), field_date(f[1], kSource, n), std::string(f[2]), field_double(f[3], kSource, n)});
  }
  return rows;
}

std::map<std::string, DailySeries<double>> read_market_caps(std::istream& in) {
  constexpr const char* kSource = "mcap";
  detail::CsvLines lines(in);
  std::string line;
  if (!lines.next(line) || line != "date,platform,market_cap") {
    bad_line(kSource, 1, "missing or malformed header (expected 'date,platform,market_cap')");
  }
  std::map<std::string, std::map<Date, double>> raw;
  std::vector<std::string_view> f;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    detail::split_fields(line, f);
    const auto n = lines.line_no();
    if (f.size() != 3) {
      bad_line(kSource, n, "expected 3 columns");
    }
    const double cap = field_double(f[2], kSource, n);
    if (cap < 0.0) {
      bad_line(kSource, n, "negative market cap");
    }
    if (!raw[std::string(f[1])].emplace(field_date(f[0], kSource, n), cap).second) {
      bad_line(kSource, n, "duplicate date for platform");
    }
  }
  std::map<std::string, DailySeries<double>> out;
  for (auto& [platform, days] : raw) {
    const Date first = days.begin()->first;
    std::vector<double> values;
    for (const auto& [d, v] : days) {
      if (d - first != static_cast<std::int32_t>(values.size())) {
        throw InputError("mcap: dates for platform '" + platform + "' are not consecutive");
      }
      values.push_back(v);
    }
    out.emplace(platform, DailySeries<double>(first, std::move(values)));
  }
  return out;
}

} // namespace agentpnl::report_io
