#include "agentpnl/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "agentpnl/parallel.hpp"
#include "csv.hpp"

namespace agentpnl::pipeline {

std::string Grouping::platform_of(const LedgerKey& key) const {
  if (!explicit_mapping) {
    return kDefaultPlatform;
  }
  if (auto w = wallet_platform.find(key.wallet); w != wallet_platform.end()) {
    return w->second;
  }
  if (auto t = token_platform.find(key.token); t != token_platform.end()) {
    return t->second;
  }
  return {};
}

bool Grouping::is_treasury(std::string_view wallet) const { return wallet_platform.find(wallet) != wallet_platform.end(); }

Grouping parse_groups(std::istream& in) {
  Grouping g;
  g.explicit_mapping = true;
  detail::CsvLines lines(in);
  std::string line;
  if (!lines.next(line)) {
    return g;
  }
  if (line != kGroupHeader) {
    throw InputError(std::string("groups:1: missing or malformed header (expected '") + kGroupHeader + "')");
  }
  std::vector<std::string_view> fields;
  while (lines.next(line)) {
    if (line.empty()) {
      continue;
    }
    detail::split_fields(line, fields);
    const auto where = "groups:" + std::to_string(lines.line_no()) + ": ";
    if (fields.size() != 3) {
      throw InputError(where + "expected 3 columns, found " + std::to_string(fields.size()));
    }
    if (fields[1].empty() || fields[2].empty()) {
      throw InputError(where + "empty id or platform");
    }
    if (fields[0] != "token" && fields[0] != "wallet") {
      throw InputError(where + "kind must be 'token' or 'wallet'");
    }
    auto& target = fields[0] == "token" ? g.token_platform : g.wallet_platform;
    if (!target.emplace(std::string(fields[1]), std::string(fields[2])).second) {
      throw InputError(where + "duplicate mapping for '" + std::string(fields[1]) + "'");
    }
  }
  return g;
}

Dataset make_dataset(ingest::BalanceParse balances, ingest::PriceParse prices, ingest::CapTable caps) {
  Dataset d{std::move(balances), std::move(prices), std::move(caps), {}};
  d.summary = ingest::validate_dataset(d.balances, d.prices, d.caps);
  return d;
}

std::optional<Date> default_end_date(const Dataset& data) {
  std::optional<Date> end;
  if (data.summary.balance_span) {
    end = data.summary.balance_span->last;
  }
  if (data.summary.price_span) {
    end = end ? std::max(*end, data.summary.price_span->last) : data.summary.price_span->last;
  }
  return end;
}

std::map<std::string, grid::PriceSeries> build_price_series(const Dataset& data, Date end,
                                                            std::vector<ingest::Diagnostic>& diagnostics) {
  std::map<std::string, grid::PriceSeries> out;
  const auto& obs = data.prices.observations;
  std::size_t i = 0;
  while (i < obs.size()) {
    std::size_t j = i;
    while (j < obs.size() && obs[j].token == obs[i].token) {
      ++j;
    }
    const std::string& token = obs[i].token;
    // Observations are time-sorted within a token: cut everything after `end`.
    std::size_t k = i;
    while (k < j && obs[k].timestamp.date() <= end) {
      ++k;
    }
    std::optional<Price> cap;
    if (auto c = data.caps.find(token); c != data.caps.end()) {
      cap = c->second;
    }
    const auto daily = grid::daily_median_price(std::span(obs).subspan(i, k - i), cap);
    if (daily.empty()) {
      diagnostics.push_back({"grid", 0, "no-admissible-price",
                             "token '" + token + "' has no price observation at or below its cap through " +
                                 end.to_string()});
    } else {
      out.emplace(token, grid::fill_price_series(daily, end));
    }
    i = j;
  }
  return out;
}

Plan make_plan(const Dataset& data, const Grouping& grouping, const Options& options) {
  Plan plan;
  plan.end = options.snapshot ? options.snapshot : default_end_date(data);
  if (!plan.end) {
    return plan;
  }
  const Date end = *plan.end;
  plan.prices = build_price_series(data, end, plan.diagnostics);

  std::map<LedgerKey, std::vector<std::span<const BalanceRecord>>> accounts;
  const auto& recs = data.balances.records;
  std::size_t truncated = 0;
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    std::size_t last_kept = i;
    while (j < recs.size() && recs[j].wallet == recs[i].wallet && recs[j].account == recs[i].account &&
           recs[j].token == recs[i].token) {
      if (recs[j].date <= end) {
        last_kept = j + 1;
      }
      ++j;
    }
    truncated += j - last_kept;
    if (last_kept > i) {
      accounts[LedgerKey{recs[i].wallet, recs[i].token}].push_back(std::span(recs).subspan(i, last_kept - i));
    }
    i = j;
  }
  if (truncated > 0) {
    plan.diagnostics.push_back({"grid", 0, "after-snapshot",
                                std::to_string(truncated) + " balance records after " + end.to_string() + " ignored"});
  }

  std::map<std::string, std::size_t> unpriced;
  for (auto& [key, runs] : accounts) {
    if (!plan.prices.contains(key.token)) {
      ++unpriced[key.token];
      continue;
    }
    plan.ledgers.push_back({key, grouping.platform_of(key), std::move(runs)});
  }
  for (const auto& [token, n] : unpriced) {
    plan.diagnostics.push_back(
        {"grid", 0, "skipped-unpriced", std::to_string(n) + " ledgers of token '" + token + "' skipped (no usable price)"});
  }
  std::stable_sort(plan.ledgers.begin(), plan.ledgers.end(), [](const LedgerPlan& a, const LedgerPlan& b) {
    return std::tie(a.platform, a.key) < std::tie(b.platform, b.key);
  });
  return plan;
}

void run_ledgers(Plan& plan, const Options& options, const LedgerSink& sink) {
  if (!plan.end) {
    return;
  }
  const Date end = *plan.end;
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  std::vector<std::optional<pnl::LedgerResult>> results;
  for (std::size_t start = 0; start < plan.ledgers.size(); start += batch) {
    const std::size_t n = std::min(batch, plan.ledgers.size() - start);
    results.assign(n, std::nullopt);
    parallel_for(n, options.threads, [&](std::size_t i) {
      const LedgerPlan& lp = plan.ledgers[start + i];
      std::vector<grid::QuantitySeries> series;
      series.reserve(lp.accounts.size());
      for (const auto& run : lp.accounts) {
        series.push_back(grid::fill_account_series(run, end));
      }
      const auto quantity = grid::aggregate_wallet_balances(series);
      auto aligned = grid::align(lp.key, quantity, plan.prices.at(lp.key.token), end);
      if (aligned) {
        results[i] = pnl::compute_ledger(*aligned);
      }
    });
    for (std::size_t i = 0; i < n; ++i) {
      const LedgerPlan& lp = plan.ledgers[start + i];
      if (!results[i]) {
        plan.diagnostics.push_back({"grid", 0, "ledger-skipped",
                                    lp.key.wallet + "/" + lp.key.token + ": balance and price ranges do not overlap"});
        continue;
      }
      if (!results[i]->unmatched_sell_quantity.is_zero()) {
        plan.diagnostics.push_back({"pnl", 0, "unmatched-sell",
                                    lp.key.wallet + "/" + lp.key.token + ": " +
                                        results[i]->unmatched_sell_quantity.to_string() + " sold without a buy lot"});
      }
      sink(lp, *results[i]);
    }
  }
}

LedgerCsvWriter::LedgerCsvWriter(std::ostream& out) : out_(out) { out_ << kLedgerHeader << '\n'; }

void LedgerCsvWriter::write(const pnl::LedgerResult& ledger) {
  buffer_.clear();
  for (const auto& p : ledger.points) {
    buffer_ += ledger.key.wallet;
    buffer_ += ',';
    buffer_ += ledger.key.token;
    buffer_ += ',';
    buffer_ += p.date.to_string();
    buffer_ += ',';
    buffer_ += p.quantity.to_string();
    buffer_ += ',';
    buffer_ += format_shortest(p.price);
    buffer_ += ',';
    buffer_ += format_money(p.cost_basis);
    buffer_ += ',';
    buffer_ += format_money(p.realized_cum);
    buffer_ += ',';
    buffer_ += format_money(p.unrealized);
    buffer_ += ',';
    buffer_ += format_money(p.total);
    buffer_ += '\n';
  }
  out_ << buffer_;
}

void merge_totals(DailySeries<Money>& into, const DailySeries<Money>& add) {
  if (add.empty()) {
    return;
  }
  if (into.empty()) {
    into = add;
    return;
  }
  const Date first = std::min(into.first, add.first);
  const Date last = std::max(into.last(), add.last());
  std::vector<Money> values(static_cast<std::size_t>(last - first) + 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Date d = first + static_cast<std::int32_t>(i);
    values[i] = into.value_or_carry(d, 0.0) + add.value_or_carry(d, 0.0);
  }
  into = DailySeries<Money>(first, std::move(values));
}

void ReportAccumulator::add(const LedgerPlan& plan, const pnl::LedgerResult& ledger) {
  if (plan.platform.empty()) {
    return;
  }
  if (grouping_.explicit_mapping && grouping_.is_treasury(plan.key.wallet)) {
    treasury_ledgers_[plan.platform].push_back(analytics::to_series(ledger));
    return;
  }
  auto& wallets = users_[plan.platform];
  const auto series = analytics::to_series(ledger).total_series();
  if (!wallets.empty() && wallets.back().wallet == plan.key.wallet) {
    merge_totals(wallets.back().total, series);
  } else {
    wallets.push_back({plan.key.wallet, plan.platform, series});
  }
}

std::map<std::string, analytics::PnlSeries> ReportAccumulator::treasuries() const {
  std::map<std::string, analytics::PnlSeries> out;
  for (const auto& [platform, ledgers] : treasury_ledgers_) {
    out.emplace(platform, analytics::aggregate_series(ledgers));
  }
  return out;
}

} // namespace agentpnl::pipeline
