#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <json.hpp>

#include "agentpnl/report_io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace agentpnl;

namespace {

const fs::path kData = AGENTPNL_DATA_DIR;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("agentpnl-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args) {
  const std::string cmd = std::string(AGENTPNL_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing " << p);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string inputs(const fs::path& dir) {
  return "--balances " + (dir / "balances.csv").string() + " --prices " + (dir / "prices.csv").string() + " --caps " +
         (dir / "caps.csv").string() + " --group " + (dir / "groups.csv").string();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

TEST_CASE("mini dataset matches its golden outputs") {
  Scratch out;
  const auto args = inputs(kData / "mini") + " --snapshot 2024-11-06 --out " + out.dir.string();
  REQUIRE(run("compute " + args) == 0);
  REQUIRE(run("report " + args + " --top-fraction 0.5 --mcap " + (kData / "mini" / "mcap.csv").string()) == 0);
  REQUIRE(run("dist " + args) == 0);
  REQUIRE(run("bench " + args + " --benchmark SOL") == 0);
  for (const char* name : {"ledgers.csv", "diagnostics.txt", "summary.json", "concentration.json", "treasury.csv",
                           "mc_to_aum.json", "dist.csv", "benchmark.json"}) {
    CAPTURE(name);
    CHECK(slurp(out / name) == slurp(kData / "mini" / "golden" / name));
  }
}

TEST_CASE("sample dataset matches its golden outputs") {
  Scratch out;
  const auto args = inputs(kData / "sample") + " --out " + out.dir.string();
  REQUIRE(run("compute " + args + " --threads 2") == 0);
  REQUIRE(run("report " + args) == 0);
  REQUIRE(run("dist " + args) == 0);
  REQUIRE(run("bench " + args + " --benchmark T000") == 0);
  const auto ledgers = slurp(out / "ledgers.csv");
  const auto golden = slurp(kData / "sample" / "golden" / "ledgers.csv.fnv1a64");
  CHECK(hex(fnv1a64(ledgers)) + "\n" == golden);
  for (const char* name : {"diagnostics.txt", "summary.json", "concentration.json", "treasury.csv", "dist.csv",
                           "benchmark.json"}) {
    CAPTURE(name);
    CHECK(slurp(out / name) == slurp(kData / "sample" / "golden" / name));
  }

  // The checked-in engine output agrees with the generator's trade-level
  // ground truth: exactly where no round trips occurred, within the netting
  // bound elsewhere.
  std::istringstream lin(ledgers);
  const auto rows = report_io::read_ledgers_csv(lin);
  std::map<std::pair<std::string, std::string>, const report_io::LedgerRow*> last;
  for (const auto& r : rows) {
    last[{r.wallet, r.token}] = &r;
  }
  const auto oracle = nlohmann::json::parse(slurp(kData / "sample" / "oracle.json"));
  std::size_t checked = 0;
  for (const auto& l : oracle["ledgers"]) {
    const auto it = last.find({l["wallet"].get<std::string>(), l["token"].get<std::string>()});
    const double truth = l["total"].get<double>();
    const double bound = l["netting_bound"].get<double>();
    const double engine = it == last.end() ? 0.0 : it->second->total;
    CHECK(std::abs(engine - truth) <= bound + 2e-6);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("exit codes") {
  Scratch out;
  const auto mini = kData / "mini";
  const std::string o = " --out " + out.dir.string();
  SUBCASE("missing prices file") {
    CHECK(run("compute --balances " + (mini / "balances.csv").string() + " --prices /nonexistent.csv" + o) == 1);
  }
  SUBCASE("missing required flag") { CHECK(run("compute --balances " + (mini / "balances.csv").string() + o) == 2); }
  SUBCASE("unknown subcommand") { CHECK(run("explode") == 2); }
  SUBCASE("bad snapshot") { CHECK(run("compute " + inputs(mini) + " --snapshot 2024-13-01" + o) == 2); }
  SUBCASE("snapshot before the data") { CHECK(run("compute " + inputs(mini) + " --snapshot 2020-01-01" + o) == 2); }
  SUBCASE("bad top fraction") { CHECK(run("report " + inputs(mini) + " --top-fraction 0" + o) == 2); }
  SUBCASE("non-increasing buckets") { CHECK(run("dist " + inputs(mini) + " --buckets 10,5" + o) == 2); }
  SUBCASE("unpriced benchmark") { CHECK(run("bench " + inputs(mini) + " --benchmark GHOST" + o) == 1); }
  SUBCASE("malformed cap table") {
    spit(out / "caps.csv", "token,max_price\nMEME,0\n");
    CHECK(run("compute --balances " + (mini / "balances.csv").string() + " --prices " + (mini / "prices.csv").string() +
              " --caps " + (out / "caps.csv").string() + o) == 1);
  }
  SUBCASE("invalid scenario params") {
    spit(out / "p.cfg", "round_trip_prob=2\n");
    CHECK(run("synth --params " + (out / "p.cfg").string() + o) == 2);
  }
  SUBCASE("help") { CHECK(run("--help") == 0); }
}

TEST_CASE("compute on an empty balance file") {
  Scratch out;
  spit(out / "balances.csv", "");
  REQUIRE(run("compute --balances " + (out / "balances.csv").string() + " --prices " +
              (kData / "mini" / "prices.csv").string() + " --out " + out.dir.string()) == 0);
  CHECK(slurp(out / "ledgers.csv") == "wallet,token,date,quantity,price,cost_basis,realized_cum,unrealized,total\n");
  const auto diag = slurp(out / "diagnostics.txt");
  CHECK(diag.find("wallets=0") != std::string::npos);
  CHECK(diag.find("no-wallets") != std::string::npos);
}

TEST_CASE("report on one wallet in one platform") {
  Scratch out;
  spit(out / "balances.csv", "date,wallet,account,token,balance\n2024-11-01,W1,A1,T1,2\n");
  spit(out / "prices.csv", "timestamp,token,price\n2024-11-01T00:00:00Z,T1,1\n2024-11-02T00:00:00Z,T1,3\n");
  const std::string args = "--balances " + (out / "balances.csv").string() + " --prices " +
                           (out / "prices.csv").string() + " --out " + out.dir.string();
  REQUIRE(run("report " + args + " --top-fraction 1.0") == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  REQUIRE(summary["platforms"].size() == 1);
  CHECK(summary["platforms"][0]["platform"] == "all");
  CHECK(summary["platforms"][0]["users"] == 1);
  CHECK(summary["platforms"][0]["max"] == 4.0);
  const auto conc = nlohmann::json::parse(slurp(out / "concentration.json"));
  CHECK(conc["overall"]["top_share"] == 1.0);

  REQUIRE(run("dist " + args) == 0);
  std::ifstream din(out / "dist.csv");
  const auto rows = report_io::read_dist_csv(din);
  std::map<Date, int> ones;
  for (const auto& r : rows) {
    CHECK((r.share == 0.0 || r.share == 1.0));
    ones[r.date] += r.share == 1.0 ? 1 : 0;
  }
  CHECK(ones.size() == 2);
  for (const auto& [date, n] : ones) {
    CHECK(n == 1);
  }

  REQUIRE(run("dist " + args + " --buckets -5,0,5") == 0);
  std::ifstream cin_(out / "dist.csv");
  const auto relabeled = report_io::read_dist_csv(cin_);
  std::set<std::string> labels;
  for (const auto& r : relabeled) {
    labels.insert(r.bucket);
  }
  CHECK(labels == std::set<std::string>{"(-inf..-5]", "(-5..0)", "0", "(0..5]", "(5..inf)"});
}

TEST_CASE("bench on token paths") {
  Scratch out;
  spit(out / "prices.csv",
       "timestamp,token,price\n2024-11-01T00:00:00Z,TOK,100\n2024-11-02T00:00:00Z,TOK,50\n2024-11-03T00:00:00Z,TOK,7\n"
       "2024-11-01T00:00:00Z,SOL,10\n2024-11-02T00:00:00Z,SOL,8\n2024-11-03T00:00:00Z,SOL,6\n");
  REQUIRE(run("bench --prices " + (out / "prices.csv").string() + " --benchmark SOL --out " + out.dir.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "benchmark.json"));
  CHECK(j["tokens"][0]["decline_from_ath"].get<double>() == doctest::Approx(0.93));
  CHECK(j["benchmark"]["decline_from_ath"].get<double>() == doctest::Approx(0.4));

  spit(out / "one.csv", "timestamp,token,price\n2024-11-01T00:00:00Z,SOL,10\n");
  REQUIRE(run("bench --prices " + (out / "one.csv").string() + " --benchmark SOL --out " + out.dir.string()) == 0);
  const auto s = nlohmann::json::parse(slurp(out / "benchmark.json"));
  CHECK(s["benchmark"]["max_drawdown"] == 0);
  CHECK(s["benchmark"]["decline_from_ath"] == 0);
  CHECK(s["average_decline"].is_null());
}

TEST_CASE("synth") {
  Scratch a;
  Scratch b;
  REQUIRE(run("synth --seed 1 --out " + a.dir.string()) == 0);
  REQUIRE(run("synth --seed 1 --out " + b.dir.string()) == 0);
  for (const char* name : {"balances.csv", "prices.csv", "caps.csv", "groups.csv", "params.cfg", "oracle.json"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }

  // Default parameters flow through compute without diagnostics.
  const std::string args = inputs(a.dir) + " --out " + (a / "out").string();
  REQUIRE(run("compute " + args) == 0);
  CHECK(slurp(a / "out" / "diagnostics.txt").find("diagnostics=0") != std::string::npos);

  Scratch empty;
  spit(empty / "p.cfg", "intensity=0\n");
  REQUIRE(run("synth --params " + (empty / "p.cfg").string() + " --out " + empty.dir.string()) == 0);
  CHECK(slurp(empty / "balances.csv") == "date,wallet,account,token,balance\n");
}
