#include "agentpnl/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <deque>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <unordered_map>

namespace agentpnl::synth {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr Quantity::Raw kMicro = Quantity::kOne / 1000000;

// Distributions are written out by hand so a seed yields the same tape with
// any standard library; only the engine is taken from <random>.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int poisson(double lambda) {
    if (lambda <= 0.0) {
      return 0;
    }
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = uniform();
    while (p > limit && k < 100) {
      ++k;
      p *= uniform();
    }
    return k;
  }

private:
  std::mt19937_64 engine_;
};

std::string padded(char prefix, std::size_t index, int width) {
  std::string digits = std::to_string(index);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

double parse_number(std::string_view key, std::string_view value) {
  auto v = parse_double(value);
  if (!v) {
    throw ConfigError("scenario parameter '" + std::string(key) + "': bad number '" + std::string(value) + "'");
  }
  return *v;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  const double v = parse_number(key, value);
  if (v < 0.0 || v != std::floor(v)) {
    throw ConfigError("scenario parameter '" + std::string(key) + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Position {
  std::vector<Quantity> accounts;
  std::size_t trade_days = 0;

  [[nodiscard]] Quantity total() const {
    Quantity t;
    for (auto q : accounts) {
      t += q;
    }
    return t;
  }
};

Quantity random_quantity(Rng& rng) {
  return Quantity::from_raw(static_cast<Quantity::Raw>(1 + rng.below(1000000000)) * kMicro);
}

Quantity fraction_of(Rng& rng, Quantity holding) {
  const auto micros = static_cast<double>(holding.raw() / kMicro);
  const auto take = std::max<Quantity::Raw>(1, static_cast<Quantity::Raw>(std::floor(micros * rng.uniform(0.1, 0.9))));
  return Quantity::from_raw(take * kMicro);
}

void append_date(std::string& out, Date d) { out += d.to_string(); }

void append_double(std::string& out, double v) { out += format_shortest(v); }

} // namespace

void ScenarioParams::validate() const {
  if (wallets == 0 || tokens == 0 || days <= 0) {
    throw ConfigError("scenario needs positive wallets, tokens and days");
  }
  if (tokens > 65535 || wallets > 0xFFFFFFFFull) {
    throw ConfigError("scenario is too large");
  }
  if (max_accounts == 0 || max_accounts > 255) {
    throw ConfigError("max_accounts must lie in [1, 255]");
  }
  if (!(intensity >= 0.0) || !std::isfinite(intensity) || intensity > 50.0) {
    throw ConfigError("intensity must lie in [0, 50]");
  }
  if (!(volatility >= 0.0) || !std::isfinite(volatility)) {
    throw ConfigError("volatility must be non-negative");
  }
  if (!(intraday_jitter >= 0.0 && intraday_jitter < 1.0)) {
    throw ConfigError("intraday_jitter must lie in [0, 1)");
  }
  for (double p : {round_trip_prob, liquidation_prob, outlier_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("probabilities must lie in [0, 1]");
    }
  }
}

ScenarioParams parse_params(std::istream& in) {
  ScenarioParams p;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') {
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("scenario params line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));
    if (key == "wallets") {
      p.wallets = parse_count(key, value);
    } else if (key == "tokens") {
      p.tokens = parse_count(key, value);
    } else if (key == "days") {
      p.days = static_cast<std::int32_t>(parse_count(key, value));
    } else if (key == "start") {
      auto d = Date::parse(value);
      if (!d) {
        throw ConfigError("scenario parameter 'start' must be YYYY-MM-DD");
      }
      p.start = *d;
    } else if (key == "intensity") {
      p.intensity = parse_number(key, value);
    } else if (key == "volatility") {
      p.volatility = parse_number(key, value);
    } else if (key == "round_trip_prob") {
      p.round_trip_prob = parse_number(key, value);
    } else if (key == "intraday_jitter") {
      p.intraday_jitter = parse_number(key, value);
    } else if (key == "liquidation_prob") {
      p.liquidation_prob = parse_number(key, value);
    } else if (key == "max_trade_days") {
      p.max_trade_days = parse_count(key, value);
    } else if (key == "outlier_prob") {
      p.outlier_prob = parse_number(key, value);
    } else if (key == "max_accounts") {
      p.max_accounts = parse_count(key, value);
    } else if (key == "treasury_wallets") {
      if (value == "true" || value == "1") {
        p.treasury_wallets = true;
      } else if (value == "false" || value == "0") {
        p.treasury_wallets = false;
      } else {
        throw ConfigError("scenario parameter 'treasury_wallets': expected true or false, got '" + std::string(value) + "'");
      }
    } else {
      throw ConfigError("unknown scenario parameter '" + std::string(key) + "'");
    }
  }
  p.validate();
  return p;
}

void write_params(std::ostream& out, const ScenarioParams& p) {
  out << "wallets=" << p.wallets << '\n'
      << "tokens=" << p.tokens << '\n'
      << "days=" << p.days << '\n'
      << "start=" << p.start.to_string() << '\n'
      << "intensity=" << format_shortest(p.intensity) << '\n'
      << "volatility=" << format_shortest(p.volatility) << '\n'
      << "round_trip_prob=" << format_shortest(p.round_trip_prob) << '\n'
      << "intraday_jitter=" << format_shortest(p.intraday_jitter) << '\n'
      << "liquidation_prob=" << format_shortest(p.liquidation_prob) << '\n'
      << "max_trade_days=" << p.max_trade_days << '\n'
      << "outlier_prob=" << format_shortest(p.outlier_prob) << '\n'
      << "max_accounts=" << p.max_accounts << '\n'
      << "treasury_wallets=" << (p.treasury_wallets ? "true" : "false") << '\n';
}

std::string wallet_id(std::size_t index) { return padded('W', index, 6); }
std::string token_id(std::size_t index) { return padded('T', index, 3); }
std::string account_id(std::size_t wallet, std::size_t account) {
  return wallet_id(wallet) + "-a" + std::to_string(account);
}
std::string platform_id(std::size_t token) { return padded('P', token, 3); }

TradeTape generate_scenario(const ScenarioParams& params, std::uint64_t seed) {
  params.validate();
  TradeTape tape;
  tape.params = params;
  tape.seed = seed;
  Rng rng(seed);

  const auto n_days = static_cast<std::size_t>(params.days);
  const double sigma = params.volatility;
  tape.reference.reserve(params.tokens);
  for (std::size_t k = 0; k < params.tokens; ++k) {
    std::vector<double> path(n_days);
    path[0] = rng.uniform(0.5, 50.0);
    for (std::size_t d = 1; d < n_days; ++d) {
      path[d] = sigma == 0.0 ? path[d - 1] : path[d - 1] * std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
    }
    tape.reference.emplace_back(params.start, std::move(path));
  }

  // Holdings: every wallet holds a random non-empty subset of tokens;
  // treasuries hold them all.
  std::vector<std::vector<std::uint16_t>> held(params.wallets);
  std::vector<std::vector<Position>> positions(params.wallets);
  for (std::size_t w = 0; w < params.wallets; ++w) {
    const bool treasury = params.treasury_wallets && w < params.tokens;
    for (std::size_t k = 0; k < params.tokens; ++k) {
      if (treasury || rng.bernoulli(0.6)) {
        held[w].push_back(static_cast<std::uint16_t>(k));
      }
    }
    if (held[w].empty()) {
      held[w].push_back(static_cast<std::uint16_t>(w % params.tokens));
    }
    for (std::size_t i = 0; i < held[w].size(); ++i) {
      Position pos;
      pos.accounts.resize(1 + rng.below(params.max_accounts));
      positions[w].push_back(std::move(pos));
    }
  }

  for (std::size_t d = 0; d < n_days; ++d) {
    const std::int64_t day_start = static_cast<std::int64_t>((params.start + static_cast<std::int32_t>(d)).days()) *
                                   kSecondsPerDay;
    for (std::size_t w = 0; w < params.wallets; ++w) {
      for (std::size_t h = 0; h < held[w].size(); ++h) {
        Position& pos = positions[w][h];
        if (params.max_trade_days != 0 && pos.trade_days >= params.max_trade_days) {
          continue;
        }
        const int events = std::min(rng.poisson(params.intensity), 50);
        if (events == 0) {
          continue;
        }
        ++pos.trade_days;
        const std::uint16_t k = held[w][h];
        const double ref = tape.reference[k].values[d];
        std::int64_t second = 60 + static_cast<std::int64_t>(rng.below(70000));
        auto emit = [&](std::size_t account, pnl::Side side, Quantity qty, Price price, bool rt) {
          tape.trades.push_back({Timestamp{day_start + second}, static_cast<std::uint32_t>(w), k,
                                 static_cast<std::uint8_t>(account), side, rt, qty, price});
          second += 1 + static_cast<std::int64_t>(rng.below(60));
          if (side == pnl::Side::buy) {
            pos.accounts[account] += qty;
          } else {
            pos.accounts[account] -= qty;
          }
        };

        if (rng.bernoulli(params.round_trip_prob)) {
          const double offset = params.intraday_jitter * rng.uniform(0.1, 1.0);
          const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
          const Price first_leg = ref * (1.0 + sign * offset);
          const Price second_leg = ref * (1.0 - sign * offset);
          const auto richest = static_cast<std::size_t>(
              std::max_element(pos.accounts.begin(), pos.accounts.end()) - pos.accounts.begin());
          if (pos.accounts[richest] > Quantity{} && rng.bernoulli(0.5)) {
            const Quantity qty = fraction_of(rng, pos.accounts[richest]);
            emit(richest, pnl::Side::sell, qty, first_leg, true);
            emit(richest, pnl::Side::buy, qty, second_leg, true);
          } else {
            const auto account = static_cast<std::size_t>(rng.below(pos.accounts.size()));
            const Quantity qty = random_quantity(rng);
            emit(account, pnl::Side::buy, qty, first_leg, true);
            emit(account, pnl::Side::sell, qty, second_leg, true);
          }
          continue;
        }

        const bool buying = pos.total().is_zero() || rng.bernoulli(0.55);
        for (int e = 0; e < events; ++e) {
          if (buying) {
            emit(static_cast<std::size_t>(rng.below(pos.accounts.size())), pnl::Side::buy, random_quantity(rng), ref,
                 false);
            continue;
          }
          if (pos.total().is_zero()) {
            break;
          }
          if (rng.bernoulli(params.liquidation_prob)) {
            for (std::size_t a = 0; a < pos.accounts.size(); ++a) {
              if (pos.accounts[a] > Quantity{}) {
                emit(a, pnl::Side::sell, pos.accounts[a], ref, false);
              }
            }
          } else {
            std::vector<std::size_t> funded;
            for (std::size_t a = 0; a < pos.accounts.size(); ++a) {
              if (pos.accounts[a] > Quantity{}) {
                funded.push_back(a);
              }
            }
            const std::size_t a = funded[static_cast<std::size_t>(rng.below(funded.size()))];
            emit(a, pnl::Side::sell, fraction_of(rng, pos.accounts[a]), ref, false);
          }
        }
      }
    }
    for (std::size_t k = 0; k < params.tokens; ++k) {
      if (params.outlier_prob > 0.0 && rng.bernoulli(params.outlier_prob)) {
        const double peak = *std::max_element(tape.reference[k].values.begin(), tape.reference[k].values.end());
        tape.outliers.push_back(
            {Timestamp{day_start + 60 + static_cast<std::int64_t>(rng.below(80000))}, token_id(k), peak * 100.0});
      }
    }
  }

  if (params.outlier_prob > 0.0) {
    for (const auto& ref : tape.reference) {
      tape.caps.push_back(*std::max_element(ref.values.begin(), ref.values.end()) * 10.0);
    }
  }

  std::stable_sort(tape.trades.begin(), tape.trades.end(), [](const Trade& a, const Trade& b) {
    return std::tie(a.time, a.wallet, a.token) < std::tie(b.time, b.wallet, b.token);
  });
  return tape;
}

DailyFiles collapse_to_daily(const TradeTape& tape) {
  const auto& params = tape.params;
  DailyFiles files;

  struct AccountRecord {
    std::int32_t date;
    std::uint32_t wallet;
    std::uint16_t token;
    std::uint8_t account;
    Quantity balance;
  };
  struct AccountState {
    Quantity balance;
    Quantity last_close;
  };
  auto account_key = [](const Trade& t) {
    return (static_cast<std::uint64_t>(t.wallet) << 24) | (static_cast<std::uint64_t>(t.token) << 8) | t.account;
  };

  std::unordered_map<std::uint64_t, AccountState> accounts;
  std::vector<std::uint64_t> touched;
  std::vector<AccountRecord> records;
  auto close_day = [&](std::int32_t day) {
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (const auto key : touched) {
      auto& st = accounts[key];
      if (st.balance != st.last_close) {
        records.push_back({day, static_cast<std::uint32_t>(key >> 24), static_cast<std::uint16_t>((key >> 8) & 0xFFFF),
                           static_cast<std::uint8_t>(key & 0xFF), st.balance});
        st.last_close = st.balance;
      }
    }
    touched.clear();
  };

  std::int32_t current_day = tape.trades.empty() ? 0 : tape.trades.front().time.date().days();
  for (const auto& t : tape.trades) {
    const std::int32_t day = t.time.date().days();
    if (day != current_day) {
      close_day(current_day);
      current_day = day;
    }
    const auto key = account_key(t);
    auto& st = accounts[key];
    st.balance = t.side == pnl::Side::buy ? st.balance + t.quantity : st.balance - t.quantity;
    touched.push_back(key);
  }
  close_day(current_day);

  std::sort(records.begin(), records.end(), [](const AccountRecord& a, const AccountRecord& b) {
    return std::tie(a.date, a.wallet, a.token, a.account) < std::tie(b.date, b.wallet, b.token, b.account);
  });
  std::vector<std::string> tokens;
  for (std::size_t k = 0; k < params.tokens; ++k) {
    tokens.push_back(token_id(k));
  }
  files.balances.reserve(records.size() * 48 + 64);
  files.balances += "date,wallet,account,token,balance\n";
  for (const auto& r : records) {
    append_date(files.balances, Date{r.date});
    files.balances += ',';
    files.balances += wallet_id(r.wallet);
    files.balances += ',';
    files.balances += account_id(r.wallet, r.account);
    files.balances += ',';
    files.balances += tokens[r.token];
    files.balances += ',';
    files.balances += r.balance.to_string();
    files.balances += '\n';
  }

  struct PricePrint {
    std::uint16_t token;
    std::int64_t second;
    double price;
  };
  std::vector<PricePrint> prints;
  prints.reserve(tape.trades.size() + tape.reference.size() * static_cast<std::size_t>(params.days));
  for (std::size_t k = 0; k < tape.reference.size(); ++k) {
    const auto& ref = tape.reference[k];
    for (std::size_t d = 0; d < ref.values.size(); ++d) {
      prints.push_back({static_cast<std::uint16_t>(k),
                        static_cast<std::int64_t>((ref.first + static_cast<std::int32_t>(d)).days()) * kSecondsPerDay,
                        ref.values[d]});
    }
  }
  for (const auto& t : tape.trades) {
    prints.push_back({t.token, t.time.seconds, t.price});
  }
  for (const auto& o : tape.outliers) {
    const auto k = static_cast<std::uint16_t>(std::stoul(o.token.substr(1)));
    prints.push_back({k, o.timestamp.seconds, o.price});
  }
  std::stable_sort(prints.begin(), prints.end(), [](const PricePrint& a, const PricePrint& b) {
    return std::tie(a.token, a.second) < std::tie(b.token, b.second);
  });
  files.prices.reserve(prints.size() * 44 + 32);
  files.prices += "timestamp,token,price\n";
  for (const auto& p : prints) {
    files.prices += Timestamp{p.second}.to_string();
    files.prices += ',';
    files.prices += tokens[p.token];
    files.prices += ',';
    append_double(files.prices, p.price);
    files.prices += '\n';
  }

  files.caps = "token,max_price\n";
  for (std::size_t k = 0; k < tape.caps.size(); ++k) {
    files.caps += tokens[k] + "," + format_shortest(tape.caps[k]) + "\n";
  }
  return files;
}

std::string groups_csv(const TradeTape& tape) {
  std::string out = "kind,id,platform\n";
  for (std::size_t k = 0; k < tape.params.tokens; ++k) {
    out += "token," + token_id(k) + "," + platform_id(k) + "\n";
  }
  if (tape.params.treasury_wallets) {
    for (std::size_t k = 0; k < tape.params.tokens && k < tape.params.wallets; ++k) {
      out += "wallet," + wallet_id(k) + "," + platform_id(k) + "\n";
    }
  }
  return out;
}

OracleResult oracle_pnl(const TradeTape& tape, std::span<const DailySeries<double>> marks) {
  const auto& params = tape.params;
  const Date start = params.start;
  const Date end = params.end();

  // Observed price range per token-day, for the netting bound.
  std::map<std::pair<std::uint16_t, std::int32_t>, std::pair<double, double>> ranges;
  for (std::size_t k = 0; k < tape.reference.size(); ++k) {
    const auto& ref = tape.reference[k];
    for (std::size_t d = 0; d < ref.values.size(); ++d) {
      ranges[{static_cast<std::uint16_t>(k), (ref.first + static_cast<std::int32_t>(d)).days()}] = {ref.values[d],
                                                                                                   ref.values[d]};
    }
  }
  for (const auto& t : tape.trades) {
    auto& r = ranges[{t.token, t.time.date().days()}];
    r.first = std::min(r.first, t.price);
    r.second = std::max(r.second, t.price);
  }

  std::map<std::pair<std::uint32_t, std::uint16_t>, std::vector<const Trade*>> by_ledger;
  for (const auto& t : tape.trades) {
    by_ledger[{t.wallet, t.token}].push_back(&t);
  }

  struct OpenLot {
    Quantity remaining;
    Price price;
  };

  OracleResult result;
  for (const auto& [ids, trades] : by_ledger) {
    const auto token = ids.second;
    OracleLedger ledger;
    ledger.days = DailySeries<OracleDay>(start, std::vector<OracleDay>(static_cast<std::size_t>(end - start) + 1));
    std::deque<OpenLot> queue;
    Quantity held;
    Money realized = 0.0;
    std::size_t next = 0;
    for (Date d = start; d <= end; d = d.next()) {
      while (next < trades.size() && trades[next]->time.date() == d) {
        const Trade& t = *trades[next++];
        if (t.side == pnl::Side::buy) {
          queue.push_back({t.quantity, t.price});
          held += t.quantity;
          if (t.round_trip) {
            const auto& r = ranges.at({token, d.days()});
            ledger.netting_bound += t.quantity.to_double() * (r.second - r.first);
            ledger.has_round_trip = true;
          }
          continue;
        }
        Quantity need = t.quantity;
        Money pnl = 0.0;
        while (need > Quantity{} && !queue.empty()) {
          OpenLot& lot = queue.front();
          const Quantity take = min(need, lot.remaining);
          pnl += take.to_double() * (t.price - lot.price);
          lot.remaining -= take;
          need -= take;
          if (lot.remaining.is_zero()) {
            queue.pop_front();
          }
        }
        held -= t.quantity;
        realized += pnl;
        ledger.sell_realized.push_back(pnl);
      }
      Money basis = 0.0;
      for (const auto& lot : queue) {
        basis += lot.remaining.to_double() * lot.price;
      }
      OracleDay& day = ledger.days.values[static_cast<std::size_t>(d - start)];
      day.quantity = held;
      day.realized_cum = realized;
      day.cost_basis = basis;
      day.unrealized = held.to_double() * marks[token].at(d) - basis;
      day.total = realized + day.unrealized;
    }
    result.emplace(LedgerKey{wallet_id(ids.first), token_id(token)}, std::move(ledger));
  }
  return result;
}

std::vector<pnl::LotMatch> queue_fifo_match(std::span<const pnl::Lot> buys, std::span<const pnl::Lot> sells) {
  struct Open {
    std::size_t index;
    Quantity remaining;
    Price price;
  };
  std::deque<Open> queue;
  for (const auto& b : buys) {
    queue.push_back({b.index, b.quantity, b.price});
  }
  std::vector<pnl::LotMatch> out;
  for (const auto& s : sells) {
    Quantity need = s.quantity;
    while (need > Quantity{} && !queue.empty()) {
      Open& front = queue.front();
      const Quantity take = min(need, front.remaining);
      out.push_back({s.index, front.index, take, s.price, front.price});
      front.remaining -= take;
      need -= take;
      if (front.remaining.is_zero()) {
        queue.pop_front();
      }
    }
  }
  return out;
}

} // namespace agentpnl::synth
