#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ccopf/format.hpp"
#include "ccopf/model.hpp"
#include "ccopf/nlp.hpp"

// CCOPF_BIN_PATH and CCOPF_DATA_PATH are injected by the build

using namespace ccopf;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("ccopf_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + (env.empty() ? "" : " ") + std::string(CCOPF_BIN_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string network() { return std::string(CCOPF_DATA_PATH) + "/pjm5.json"; }
std::string network3() { return std::string(CCOPF_DATA_PATH) + "/pjm5_case3.json"; }

}  // namespace

TEST_CASE("gen writes a reproducible scenario CSV plus manifest") {
  Sandbox sb;
  const auto out1 = sb / "a.csv";
  const auto out2 = sb / "b.csv";
  const std::string args = "gen --network " + network() + " --count 500 --seed 42 --out ";
  REQUIRE(run(args + out1) == 0);
  REQUIRE(run(args + out2) == 0);
  CHECK(format::read_file(out1) == format::read_file(out2));
  CHECK(fs::exists(out1 + ".manifest.json"));

  // header matches the bundled network's buses
  std::ifstream in(out1);
  std::string header;
  std::getline(in, header);
  CHECK(header == "sample,wind_bus_3,load_bus_2,load_bus_3,load_bus_4");
}

TEST_CASE("argument validation exits with code 3") {
  Sandbox sb;
  CHECK(run("gen --network " + network() + " --count 0 --seed 1 --out " + sb / "x.csv") == 3);
  CHECK(run("solve --network " + network() + " --scenarios none.csv --alpha 1.2 --out " +
            sb / "y.json") == 3);
  CHECK(run("gen --network nosuch.json --count 5 --seed 1 --out " + sb / "z.csv") == 3);
  CHECK(run("solve --network " + network() + " --variant cc --out " + sb / "w.json") == 3);
}

TEST_CASE("solve / verify / compare round trip on a small sample set") {
  Sandbox sb;
  const auto scsv = sb / "s.csv";
  const auto rep = sb / "rep.json";
  const auto det = sb / "det.json";
  const auto probs = sb / "probs.csv";
  REQUIRE(run("gen --network " + network() + " --count 1500 --seed 7 --out " + scsv) == 0);
  REQUIRE(run("solve --network " + network() + " --scenarios " + scsv + " --out " + rep) == 0);
  REQUIRE(run("solve --network " + network() + " --variant det --out " + det) == 0);

  const auto rj = nlohmann::json::parse(format::read_file(rep));
  CHECK(rj.at("variant") == "inner");
  CHECK(rj.at("status") == "converged");
  const double beta = rj.at("decision").at("beta_w").at("3").get<double>();
  CHECK(std::abs(beta - 1.0) <= 1e-2);  // case-1 forecast: no curtailment

  // restriction property: the stochastic decision can cost no less than the
  // deterministic optimum when both are priced at the forecast scenario
  const auto net = model::load_network(network());
  const auto forecast = scenario::forecast_scenarios(net);
  dcflow::Decision u_cc;
  for (const auto& [bus, v] : rj.at("decision").at("beta_w").items())
    u_cc.beta_w[std::stoi(bus)] = v.get<double>();
  for (const auto& [bus, v] : rj.at("decision").at("p_g").items())
    u_cc.p_g[std::stoi(bus)] = v.get<double>();
  const auto dj = nlohmann::json::parse(format::read_file(det));
  const double det_obj = dj.at("objective_per_h").get<double>();
  CHECK(saa::objective(net, u_cc, forecast).value >= det_obj - 1e-6);

  // verify twice with qmc: byte-identical output
  REQUIRE(run("verify --network " + network() + " --solution " + rep +
              " --points 4096 --method qmc --out " + probs) == 0);
  const std::string first = format::read_file(probs);
  REQUIRE(run("verify --network " + network() + " --solution " + rep +
              " --points 4096 --method qmc --out " + probs) == 0);
  CHECK(format::read_file(probs) == first);
  CHECK(first.rfind("bus,1,2,3,4,5\n", 0) == 0);

  // compare writes exactly two trajectory CSVs, one summary, one manifest
  const auto cdir = sb / "cmp";
  REQUIRE(run("compare --network " + network() + " --scenarios " + scsv + " --stoch " + rep +
              " --det " + det + " --out " + cdir) == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(cdir)) {
    ++files;
    (void)e;
  }
  CHECK(files == 4);
  CHECK(fs::exists(fs::path(cdir) / "trajectories_stochastic.csv"));
  CHECK(fs::exists(fs::path(cdir) / "trajectories_deterministic.csv"));
  CHECK(fs::exists(fs::path(cdir) / "summary.json"));
  CHECK(fs::exists(fs::path(cdir) / "manifest.json"));

  // comparing a report against itself flags nothing
  const auto cdir2 = sb / "cmp_self";
  REQUIRE(run("compare --network " + network() + " --scenarios " + scsv + " --stoch " + rep +
              " --det " + rep + " --out " + cdir2) == 0);
  const auto self = nlohmann::json::parse(format::read_file(fs::path(cdir2) / "summary.json"));
  CHECK(self.at("flagged_feeders").get<std::size_t>() == 0);
}

TEST_CASE("verify rejects malformed solution files with exit 3") {
  Sandbox sb;
  const auto bad = sb / "bad.json";
  format::write_file(bad, "{\"not\": \"a report\"}");
  CHECK(run("verify --network " + network() + " --solution " + bad + " --points 2048 --out " +
            sb / "p.csv") == 3);
}

TEST_CASE("mismatched reports are rejected by compare with exit 3") {
  Sandbox sb;
  const auto scsv = sb / "s.csv";
  const auto rep = sb / "rep.json";
  REQUIRE(run("gen --network " + network3() + " --count 800 --seed 3 --out " + scsv) == 0);
  REQUIRE(run("solve --network " + network3() + " --scenarios " + scsv + " --out " + rep) == 0);
  // deterministic report solved against a different network file
  const auto det = sb / "det.json";
  REQUIRE(run("solve --network " + network() + " --variant det --out " + det) == 0);
  CHECK(run("compare --network " + network3() + " --scenarios " + scsv + " --stoch " + rep +
            " --det " + det + " --out " + sb / "cmp") == 3);
}

TEST_CASE("worker count does not change any output byte") {
  Sandbox sb;
  const auto gen_with = [&](const std::string& env, const std::string& name) {
    const auto out = sb / name;
    REQUIRE(run("gen --network " + network() + " --count 1000 --seed 5 --out " + out, env) == 0);
    return format::read_file(out);
  };
  const std::string base = gen_with("CCOPF_THREADS=1", "t1.csv");
  CHECK(gen_with("CCOPF_THREADS=4", "t4.csv") == base);
  CHECK(gen_with("", "tdflt.csv") == base);

  const auto solve_with = [&](const std::string& env, const std::string& name) {
    const auto out = sb / name;
    REQUIRE(run("solve --network " + network() + " --scenarios " + sb / "t1.csv" + " --out " + out,
                env) == 0);
    return format::read_file(out);
  };
  const std::string rep = solve_with("CCOPF_THREADS=1", "r1.json");
  CHECK(solve_with("CCOPF_THREADS=4", "r4.json") == rep);
  CHECK(solve_with("", "rdflt.json") == rep);
}

TEST_CASE("commands do not mutate their inputs") {
  Sandbox sb;
  const auto scsv = sb / "s.csv";
  REQUIRE(run("gen --network " + network() + " --count 300 --seed 9 --out " + scsv) == 0);
  const std::string net_digest = format::file_digest(network());
  const std::string scen_digest = format::file_digest(scsv);
  REQUIRE(run("solve --network " + network() + " --scenarios " + scsv + " --out " + sb / "r.json") ==
          0);
  CHECK(format::file_digest(network()) == net_digest);
  CHECK(format::file_digest(scsv) == scen_digest);
}

TEST_CASE("a run can be reproduced from its manifest configuration") {
  Sandbox sb;
  const auto out = sb / "m.csv";
  REQUIRE(run("gen --network " + network() + " --count 400 --seed 11 --source qmc --out " + out) ==
          0);
  const auto manifest = nlohmann::json::parse(format::read_file(out + ".manifest.json"));
  const auto& cfg = manifest.at("config");
  const auto replay = sb / "replay.csv";
  const std::string args = "gen --network " + cfg.at("network").get<std::string>() + " --count " +
                           std::to_string(cfg.at("count").get<std::size_t>()) + " --seed " +
                           std::to_string(cfg.at("seed").get<std::uint64_t>()) + " --source " +
                           (cfg.at("source").get<std::string>() == "quasi-monte-carlo" ? "qmc"
                                                                                        : "mc") +
                           " --out " + replay;
  REQUIRE(run(args) == 0);
  CHECK(format::read_file(replay) == format::read_file(out));
}
