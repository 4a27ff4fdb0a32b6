#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentpnl/analytics.hpp"
#include "agentpnl/model.hpp"

namespace agentpnl::report_io {

/// Minimal pretty-printing JSON emitter. Money values are written as fixed
/// 6-decimal numbers; fractions and ratios use the shortest exact form.
class JsonWriter {
public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& string(std::string_view v);
  JsonWriter& money(Money v);
  JsonWriter& number(double v);
  JsonWriter& integer(std::uint64_t v);
  JsonWriter& null();

  [[nodiscard]] std::string str() const { return out_ + "\n"; }

private:
  void before_value();
  void newline();

  std::string out_;
  std::vector<bool> has_items_;
  bool after_key_ = false;
};

void write_summary_json(std::ostream& out, Date snapshot,
                        const std::map<std::string, analytics::SummaryStats>& platforms);

void write_concentration_json(std::ostream& out, double top_fraction, const analytics::ConcentrationReport& overall,
                              const std::map<std::string, analytics::ConcentrationReport>& platforms);

inline constexpr const char* kDistHeader = "platform,date,bucket_label,share";
void write_dist_csv(std::ostream& out, const std::map<std::string, analytics::BucketMatrix>& platforms);

void write_benchmark_json(std::ostream& out, const analytics::BenchmarkReport& report);

inline constexpr const char* kTreasuryHeader = "platform,date,realized_cum,unrealized,total,aum";
void write_treasury_csv(std::ostream& out, const std::map<std::string, analytics::PnlSeries>& treasuries);

void write_mc_to_aum_json(std::ostream& out, const std::map<std::string, analytics::McToAum>& ratios);

struct LedgerRow {
  std::string wallet;
  std::string token;
  Date date;
  Quantity quantity;
  Price price = 0.0;
  Money cost_basis = 0.0;
  Money realized_cum = 0.0;
  Money unrealized = 0.0;
  Money total = 0.0;
};

/// Reads `ledgers.csv`. Throws InputError on any malformed line.
std::vector<LedgerRow> read_ledgers_csv(std::istream& in);

struct PlatformSummary {
  std::string platform;
  analytics::SummaryStats stats;
};

struct SummaryFile {
  Date snapshot;
  std::vector<PlatformSummary> platforms;
};

SummaryFile read_summary_json(std::istream& in);

struct DistRow {
  std::string platform;
  Date date;
  std::string bucket;
  double share = 0.0;
};

std::vector<DistRow> read_dist_csv(std::istream& in);

/// `date,platform,market_cap` rows, grouped into one daily series per
/// platform. Dates must be consecutive within a platform.
std::map<std::string, DailySeries<double>> read_market_caps(std::istream& in);

} // namespace agentpnl::report_io
