#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agentpnl/analytics.hpp"
#include "agentpnl/model.hpp"

namespace agentpnl::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kConfigError = 2,
};

struct RunConfig {
  std::filesystem::path balances;
  std::filesystem::path prices;
  std::optional<std::filesystem::path> caps;
  std::optional<std::filesystem::path> groups;
  std::optional<std::filesystem::path> market_caps;
  std::filesystem::path out;
  std::optional<Date> snapshot;
  std::vector<double> buckets = analytics::kDefaultBucketBoundaries;
  double top_fraction = 0.01;
  std::string benchmark;
  std::size_t threads = 1;
};

struct SynthConfig {
  std::optional<std::filesystem::path> params;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

/// Writes `ledgers.csv` and `diagnostics.txt`.
int cmd_compute(const RunConfig& config);
/// Writes `summary.json`, `concentration.json`, `treasury.csv` and, with
/// market caps, `mc_to_aum.json`.
int cmd_report(const RunConfig& config);
/// Writes `dist.csv`.
int cmd_dist(const RunConfig& config);
/// Writes `benchmark.json`.
int cmd_bench(const RunConfig& config);
/// Writes the scenario CSVs, `params.cfg` and `oracle.json`.
int cmd_synth(const SynthConfig& config);

/// Parses arguments and dispatches to a subcommand.
int run(int argc, const char* const* argv);

} // namespace agentpnl::cli
