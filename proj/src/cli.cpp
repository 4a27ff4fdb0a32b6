#include "agentpnl/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "agentpnl/ingest.hpp"
#include "agentpnl/pipeline.hpp"
#include "agentpnl/report_io.hpp"
#include "agentpnl/synth.hpp"

namespace agentpnl::cli {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  return in;
}

std::ofstream open_output(const fs::path& dir, const char* name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write '" + (dir / name).string() + "'");
  }
  return out;
}

struct Inputs {
  pipeline::Dataset data;
  pipeline::Grouping grouping;
};

Inputs load(const RunConfig& config, bool need_balances = true) {
  if (!(config.top_fraction > 0.0 && config.top_fraction <= 1.0)) {
    throw ConfigError("--top-fraction must lie in (0, 1]");
  }
  ingest::BalanceParse balances;
  if (need_balances || !config.balances.empty()) {
    auto in = open_input(config.balances);
    balances = ingest::parse_balances(in);
  }
  auto prices_in = open_input(config.prices);
  auto prices = ingest::parse_prices(prices_in);
  ingest::CapTable caps;
  if (config.caps) {
    auto in = open_input(*config.caps);
    caps = ingest::parse_caps(in);
  }
  Inputs inputs{pipeline::make_dataset(std::move(balances), std::move(prices), std::move(caps)), {}};
  if (config.groups) {
    auto in = open_input(*config.groups);
    inputs.grouping = pipeline::parse_groups(in);
  }
  if (config.snapshot) {
    std::optional<Date> start;
    const auto& s = inputs.data.summary;
    if (s.balance_span) {
      start = s.balance_span->first;
    }
    if (s.price_span) {
      start = start ? std::min(*start, s.price_span->first) : s.price_span->first;
    }
    if (start && *config.snapshot < *start) {
      throw ConfigError("--snapshot " + config.snapshot->to_string() + " precedes dataset start " +
                        start->to_string());
    }
  }
  return inputs;
}

pipeline::Options options_of(const RunConfig& config) {
  pipeline::Options o;
  o.snapshot = config.snapshot;
  o.threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  return o;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}

void write_diagnostics(std::ostream& out, const pipeline::Dataset& data, const pipeline::Plan& plan,
                       std::size_t ledgers) {
  const auto& s = data.summary;
  auto span = [](const std::optional<ingest::DateSpan>& sp) {
    return sp ? sp->first.to_string() + ".." + sp->last.to_string() : std::string("none");
  };
  out << "balance_records=" << s.n_balance_records << '\n'
      << "price_observations=" << s.n_price_observations << '\n'
      << "wallets=" << s.n_wallets << '\n'
      << "accounts=" << s.n_accounts << '\n'
      << "tokens=" << s.n_tokens << '\n'
      << "balance_span=" << span(s.balance_span) << '\n'
      << "price_span=" << span(s.price_span) << '\n'
      << "end_date=" << (plan.end ? plan.end->to_string() : std::string("none")) << '\n'
      << "ledgers=" << ledgers << '\n'
      << "diagnostics=" << s.diagnostics.size() + plan.diagnostics.size() << '\n';
  for (const auto& d : s.diagnostics) {
    out << d.to_string() << '\n';
  }
  for (const auto& d : plan.diagnostics) {
    out << d.to_string() << '\n';
  }
}

struct Accumulated {
  pipeline::Plan plan;
  std::unique_ptr<pipeline::ReportAccumulator> acc;
};

Accumulated accumulate(const Inputs& inputs, const RunConfig& config) {
  const auto options = options_of(config);
  Accumulated a{pipeline::make_plan(inputs.data, inputs.grouping, options),
                std::make_unique<pipeline::ReportAccumulator>(inputs.grouping)};
  pipeline::run_ledgers(a.plan, options,
                        [&](const pipeline::LedgerPlan& lp, const pnl::LedgerResult& r) { a.acc->add(lp, r); });
  return a;
}

} // namespace

int cmd_compute(const RunConfig& config) {
  return guarded([&] {
    const auto inputs = load(config);
    const auto options = options_of(config);
    auto plan = pipeline::make_plan(inputs.data, inputs.grouping, options);
    auto out = open_output(config.out, "ledgers.csv");
    pipeline::LedgerCsvWriter writer(out);
    std::size_t ledgers = 0;
    pipeline::run_ledgers(plan, options, [&](const pipeline::LedgerPlan&, const pnl::LedgerResult& r) {
      writer.write(r);
      ++ledgers;
    });
    out.close();
    auto diag = open_output(config.out, "diagnostics.txt");
    write_diagnostics(diag, inputs.data, plan, ledgers);
    return kSuccess;
  });
}

int cmd_report(const RunConfig& config) {
  return guarded([&] {
    const auto inputs = load(config);
    std::optional<std::map<std::string, DailySeries<double>>> market_caps;
    if (config.market_caps) {
      auto in = open_input(*config.market_caps);
      market_caps = report_io::read_market_caps(in);
    }
    auto a = accumulate(inputs, config);
    const Date snapshot = a.plan.end.value_or(Date{});

    std::map<std::string, analytics::SummaryStats> summaries;
    std::map<std::string, analytics::ConcentrationReport> concentrations;
    std::vector<analytics::WalletTotal> pooled;
    for (const auto& [platform, wallets] : a.acc->users()) {
      const auto totals = analytics::snapshot_totals(wallets, snapshot);
      if (totals.empty()) {
        continue;
      }
      summaries.emplace(platform, analytics::summary_stats(totals));
      concentrations.emplace(platform, analytics::concentration(totals, config.top_fraction));
      pooled.insert(pooled.end(), totals.begin(), totals.end());
    }
    const auto overall = analytics::concentration(pooled, config.top_fraction);

    auto summary_out = open_output(config.out, "summary.json");
    report_io::write_summary_json(summary_out, snapshot, summaries);
    auto conc_out = open_output(config.out, "concentration.json");
    report_io::write_concentration_json(conc_out, config.top_fraction, overall, concentrations);

    const auto treasuries = a.acc->treasuries();
    auto treasury_out = open_output(config.out, "treasury.csv");
    report_io::write_treasury_csv(treasury_out, treasuries);

    if (market_caps) {
      std::map<std::string, analytics::McToAum> ratios;
      for (const auto& [platform, mcap] : *market_caps) {
        const auto t = treasuries.find(platform);
        if (t == treasuries.end()) {
          std::cerr << "warning: no treasury for platform '" << platform << "', MC-to-AUM skipped\n";
          continue;
        }
        try {
          ratios.emplace(platform, analytics::mc_to_aum(mcap, t->second.market_value_series()));
        } catch (const DomainError& e) {
          std::cerr << "warning: platform '" << platform << "': " << e.what() << '\n';
        }
      }
      auto ratio_out = open_output(config.out, "mc_to_aum.json");
      report_io::write_mc_to_aum_json(ratio_out, ratios);
    }
    return kSuccess;
  });
}

int cmd_dist(const RunConfig& config) {
  return guarded([&] {
    std::optional<analytics::Buckets> buckets;
    try {
      buckets.emplace(config.buckets);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--buckets: ") + e.what());
    }
    const auto inputs = load(config);
    auto a = accumulate(inputs, config);
    std::map<std::string, analytics::BucketMatrix> matrices;
    if (a.plan.end) {
      for (const auto& [platform, wallets] : a.acc->users()) {
        if (wallets.empty()) {
          continue;
        }
        Date first = *a.plan.end;
        std::vector<DailySeries<Money>> series;
        series.reserve(wallets.size());
        for (const auto& w : wallets) {
          first = std::min(first, w.total.first);
          series.push_back(w.total);
        }
        const auto dates = date_range(first, *a.plan.end);
        matrices.emplace(platform, analytics::bucket_distribution(series, *buckets, dates));
      }
    }
    auto out = open_output(config.out, "dist.csv");
    report_io::write_dist_csv(out, matrices);
    return kSuccess;
  });
}

int cmd_bench(const RunConfig& config) {
  return guarded([&] {
    if (config.benchmark.empty()) {
      throw ConfigError("--benchmark is required");
    }
    const auto inputs = load(config, false);
    const auto end = config.snapshot ? config.snapshot : pipeline::default_end_date(inputs.data);
    if (!end) {
      throw InputError("no price observations");
    }
    std::vector<ingest::Diagnostic> diagnostics;
    const auto prices = pipeline::build_price_series(inputs.data, *end, diagnostics);
    const auto report = analytics::benchmark_report(prices, config.benchmark);
    auto out = open_output(config.out, "benchmark.json");
    report_io::write_benchmark_json(out, report);
    return kSuccess;
  });
}

int cmd_synth(const SynthConfig& config) {
  return guarded([&] {
    synth::ScenarioParams params;
    if (config.params) {
      std::ifstream in(*config.params);
      if (!in) {
        throw ConfigError("cannot open scenario params '" + config.params->string() + "'");
      }
      params = synth::parse_params(in);
    }
    const auto tape = synth::generate_scenario(params, config.seed);
    const auto files = synth::collapse_to_daily(tape);
    open_output(config.out, "balances.csv") << files.balances;
    open_output(config.out, "prices.csv") << files.prices;
    open_output(config.out, "caps.csv") << files.caps;
    open_output(config.out, "groups.csv") << synth::groups_csv(tape);
    {
      auto out = open_output(config.out, "params.cfg");
      out << "# seed=" << config.seed << '\n';
      synth::write_params(out, params);
    }

    const auto oracle = synth::oracle_pnl(tape, tape.reference);
    report_io::JsonWriter w;
    w.begin_object();
    w.key("seed").integer(config.seed);
    w.key("start_date").string(params.start.to_string());
    w.key("end_date").string(params.end().to_string());
    w.key("ledgers").begin_array();
    for (const auto& [key, ledger] : oracle) {
      const auto& last = ledger.days.values.back();
      w.begin_object();
      w.key("wallet").string(key.wallet);
      w.key("token").string(key.token);
      w.key("quantity").string(last.quantity.to_string());
      w.key("realized").money(last.realized_cum);
      w.key("cost_basis").money(last.cost_basis);
      w.key("unrealized").money(last.unrealized);
      w.key("total").money(last.total);
      w.key("netting_bound").money(ledger.netting_bound);
      w.key("sell_realized").begin_array();
      for (const auto v : ledger.sell_realized) {
        w.money(v);
      }
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
    open_output(config.out, "oracle.json") << w.str();
    return kSuccess;
  });
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Wallet PnL engine: FIFO realized and mark-to-market PnL from daily balance snapshots"};
  app.require_subcommand(1);

  RunConfig config;
  std::string snapshot;
  std::string buckets;
  fs::path caps;
  fs::path groups;
  fs::path mcap;

  auto add_common = [&](CLI::App* sub, bool balances_required) {
    auto* b = sub->add_option("--balances", config.balances, "Balance snapshot CSV");
    if (balances_required) {
      b->required();
    }
    sub->add_option("--prices", config.prices, "Price observation CSV")->required();
    sub->add_option("--caps", caps, "Per-token price cap CSV");
    sub->add_option("--group", groups, "Platform grouping CSV (kind,id,platform)");
    sub->add_option("--out", config.out, "Output directory")->required();
    sub->add_option("--snapshot", snapshot, "Analysis end date (YYYY-MM-DD)");
    sub->add_option("--threads", config.threads, "Worker threads (0 = all cores)");
  };

  auto* compute = app.add_subcommand("compute", "Per-ledger daily PnL (ledgers.csv)");
  add_common(compute, true);
  auto* report = app.add_subcommand("report", "User PnL summary and concentration per platform");
  add_common(report, true);
  report->add_option("--top-fraction", config.top_fraction, "Top fraction of winners")->capture_default_str();
  report->add_option("--mcap", mcap, "Market cap CSV (date,platform,market_cap)");
  auto* dist = app.add_subcommand("dist", "Share of wallets per PnL bucket over time");
  add_common(dist, true);
  dist->add_option("--buckets", buckets, "Comma-separated bucket boundaries in USD");
  auto* bench = app.add_subcommand("bench", "Drawdown and decline-from-ATH per token vs a benchmark");
  add_common(bench, false);
  bench->add_option("--benchmark", config.benchmark, "Benchmark token id")->required();

  SynthConfig synth_config;
  fs::path params;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario with ground truth");
  synth_cmd->add_option("--params", params, "Scenario key=value file");
  synth_cmd->add_option("--seed", synth_config.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_config.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (!snapshot.empty()) {
      config.snapshot = Date::parse_or_throw(snapshot);
    }
    if (!buckets.empty()) {
      config.buckets.clear();
      std::stringstream ss(buckets);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = parse_double(item);
        if (!v) {
          throw ConfigError("--buckets: bad boundary '" + item + "'");
        }
        config.buckets.push_back(*v);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (!caps.empty()) {
    config.caps = caps;
  }
  if (!groups.empty()) {
    config.groups = groups;
  }
  if (!mcap.empty()) {
    config.market_caps = mcap;
  }
  if (!params.empty()) {
    synth_config.params = params;
  }

  if (compute->parsed()) {
    return cmd_compute(config);
  }
  if (report->parsed()) {
    return cmd_report(config);
  }
  if (dist->parsed()) {
    return cmd_dist(config);
  }
  if (bench->parsed()) {
    return cmd_bench(config);
  }
  return cmd_synth(synth_config);
}

} // namespace agentpnl::cli
