// Command-line front end: scenario generation, chance-constrained and
// deterministic solves, quasi-Monte Carlo verification, and comparison
// reports.  Exit codes: 0 success, 2 infeasible, 3 input error,
// 4 non-convergence.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <nlohmann/json.hpp>

#include "ccopf/format.hpp"
#include "ccopf/model.hpp"
#include "ccopf/nlp.hpp"
#include "ccopf/parallel.hpp"
#include "ccopf/scenario.hpp"
#include "ccopf/verify.hpp"

namespace {

using namespace ccopf;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "ccopf 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInputError = 3;
constexpr int kExitNoConvergence = 4;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

ordered_json manifest_base(const std::string& command, const Timer& timer) {
  ordered_json m;
  m["tool"] = kToolVersion;
  m["command"] = command;
  m["config"] = ordered_json::object();
  m["inputs"] = ordered_json::object();
  m["wall_seconds"] = timer.seconds();
  return m;
}

void write_manifest(ordered_json manifest, const std::filesystem::path& path, const Timer& timer) {
  manifest["wall_seconds"] = timer.seconds();
  format::write_file(path, manifest.dump(2) + "\n");
}

model::Network load_network_checked(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError("network file not found: " + path);
  return model::load_network(path);
}

scenario::ScenarioSet load_scenarios_checked(const model::Network& net, const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError("scenario file not found: " + path);
  auto set = scenario::load_scenarios(path);
  scenario::validate_schema(net, set);
  return set;
}

ordered_json decision_json(const dcflow::Decision& u) {
  ordered_json beta = ordered_json::object();
  for (const auto& [bus, v] : u.beta_w) beta[std::to_string(bus)] = v;
  ordered_json pg = ordered_json::object();
  for (const auto& [bus, v] : u.p_g) pg[std::to_string(bus)] = v;
  return ordered_json{{"beta_w", beta}, {"p_g", pg}};
}

dcflow::Decision decision_from_json(const nlohmann::json& j) {
  dcflow::Decision u;
  for (const auto& [bus, v] : j.at("beta_w").items()) u.beta_w[std::stoi(bus)] = v.get<double>();
  for (const auto& [bus, v] : j.at("p_g").items()) u.p_g[std::stoi(bus)] = v.get<double>();
  return u;
}

ordered_json report_json(const nlp::SolveReport& rep, const std::string& network_path,
                         const std::string& network_digest, const ordered_json& scenario_info) {
  ordered_json j;
  j["tool"] = kToolVersion;
  j["variant"] = saa::to_string(rep.variant);
  j["status"] = nlp::to_string(rep.status);
  j["network"] = {{"path", network_path}, {"digest", network_digest}};
  j["scenarios"] = scenario_info;
  j["decision"] = decision_json(rep.u_star);
  j["objective_per_h"] = rep.objective;
  j["bound_penalty"] = rep.penalty_raw;
  if (rep.bracket) {
    j["bracket"] = {{"outer_objective", rep.bracket->first},
                    {"inner_objective", rep.bracket->second},
                    {"relative_gap", (rep.bracket->second - rep.bracket->first) /
                                         std::max(1.0, std::abs(rep.bracket->second))}};
  }
  j["tau_trace"] = rep.tau_trace;
  ordered_json feeders = ordered_json::array();
  for (const auto& pr : rep.per_feeder) {
    feeders.push_back({{"from", pr.from},
                       {"to", pr.to},
                       {"alpha", pr.alpha},
                       {"psi", pr.psi},
                       {"phi", pr.phi},
                       {"violation_rate", pr.violation_rate},
                       {"satisfaction_rate", pr.satisfaction_rate}});
  }
  j["per_feeder"] = feeders;
  j["bound_audit"] = {{"angle_violations", rep.audit.angle_violations},
                      {"slack_violations", rep.audit.slack_violations},
                      {"worst_angle_excess_rad", rep.audit.worst_angle_excess},
                      {"worst_slack_excess_mw", rep.audit.worst_slack_excess}};
  j["iterations"] = {{"inner", rep.inner_iterations}, {"outer", rep.outer_iterations}};
  return j;
}

ordered_json scenario_provenance(const scenario::ScenarioSet& set, const std::string& path) {
  ordered_json s;
  s["path"] = path;
  s["digest"] = format::file_digest(path);
  s["count"] = set.count();
  s["provenance_known"] = set.provenance_known;
  s["seed"] = set.seed;
  s["source"] = scenario::to_string(set.source);
  s["qmc_offset"] = set.qmc_offset;
  return s;
}

// ---------------------------------------------------------------------------

int cmd_gen(const std::string& network_path, std::size_t count, std::uint64_t seed,
            const std::string& source_str, const std::string& out_path) {
  Timer timer;
  const auto net = load_network_checked(network_path);
  const auto source = scenario::source_from_string(source_str);
  const auto set = scenario::generate_scenarios(net, count, seed, source);
  scenario::save_scenarios(set, out_path);

  ordered_json manifest = manifest_base("gen", timer);
  manifest["config"] = {{"network", network_path}, {"count", count},   {"seed", seed},
                        {"source", scenario::to_string(source)},       {"qmc_offset", set.qmc_offset},
                        {"out", out_path}};
  manifest["inputs"] = {{"network_digest", format::file_digest(network_path)}};
  manifest["outputs"] = {{"scenario_csv", out_path},
                         {"scenario_digest", format::file_digest(out_path)}};
  write_manifest(manifest, out_path + ".manifest.json", timer);
  std::cout << "wrote " << set.count() << " scenarios to " << out_path << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& network_path, const std::string& scenarios_path,
              std::optional<double> alpha, const nlp::SolverConfig& cfg,
              smoothing::SmoothingParams smoothing_params, double penalty_weight,
              const std::string& variant, const std::string& out_path) {
  Timer timer;
  auto net = load_network_checked(network_path);
  if (alpha) {
    for (auto& f : net.feeders) f.alpha = *alpha;
  }
  const std::string network_digest = format::file_digest(network_path);

  nlp::SolveReport rep;
  ordered_json scenario_info;
  if (variant == "cc") {
    const auto set = load_scenarios_checked(net, scenarios_path);
    scenario_info = scenario_provenance(set, scenarios_path);
    auto result = nlp::continuation_solve(net, set, smoothing_params, cfg, penalty_weight);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    rep = result.inner;
  } else if (variant == "det") {
    const auto forecast = scenario::forecast_scenarios(net);
    scenario_info = {{"path", nullptr}, {"count", 1}, {"source", "forecast"}};
    auto problem = saa::assemble(net, forecast, saa::Variant::Deterministic, smoothing_params,
                                 penalty_weight);
    rep = nlp::minimize(problem, problem.default_start(), cfg);
  } else {
    throw InputError("unknown variant '" + variant + "' (expected cc or det)");
  }
  rep.network_digest = network_digest;

  if (rep.status == nlp::Status::Infeasible) {
    std::cerr << "infeasible: no point satisfies the constraints\n";
    return kExitInfeasible;
  }
  if (rep.status == nlp::Status::MaxIterations) {
    std::cerr << "did not converge within the iteration budget\n";
    return kExitNoConvergence;
  }

  ordered_json j = report_json(rep, network_path, network_digest, scenario_info);
  format::write_file(out_path, j.dump(2) + "\n");

  ordered_json manifest = manifest_base("solve", timer);
  manifest["config"] = {{"network", network_path},
                        {"scenarios", variant == "cc" ? ordered_json(scenarios_path) : ordered_json(nullptr)},
                        {"alpha", alpha ? ordered_json(*alpha) : ordered_json(nullptr)},
                        {"variant", variant},
                        {"tau0", cfg.tau0},
                        {"tau_decay", cfg.tau_decay},
                        {"tau_min", cfg.tau_min},
                        {"m1", smoothing_params.m1},
                        {"m2", smoothing_params.m2},
                        {"penalty_weight", penalty_weight},
                        {"inner_rhs_factor", cfg.inner_rhs_factor},
                        {"constraint_tol", cfg.constraint_tol},
                        {"stationarity_tol", cfg.stationarity_tol},
                        {"bracket_gap_tol", cfg.bracket_gap_tol},
                        {"out", out_path}};
  manifest["inputs"] = {{"network_digest", network_digest}};
  manifest["outputs"] = {{"report", out_path}, {"report_digest", format::file_digest(out_path)}};
  manifest["timing"] = {{"solve_seconds", rep.wall_seconds}};  // T_CPU
  write_manifest(manifest, out_path + ".manifest.json", timer);
  std::cout << "objective " << rep.objective << " $/h, status " << nlp::to_string(rep.status)
            << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& network_path, const std::string& solution_path,
               std::size_t points, const std::string& method_str, std::uint64_t seed,
               const std::string& out_path) {
  Timer timer;
  const auto net = load_network_checked(network_path);
  if (!std::filesystem::exists(solution_path))
    throw InputError("solution file not found: " + solution_path);

  nlohmann::json solution;
  dcflow::Decision u;
  try {
    solution = nlohmann::json::parse(format::read_file(solution_path));
    u = decision_from_json(solution.at("decision"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed solution file " + solution_path + ": " + e.what());
  }
  const std::string network_digest = format::file_digest(network_path);
  if (solution.contains("network") && solution["network"].contains("digest") &&
      solution["network"]["digest"].get<std::string>() != network_digest)
    throw InputError("solution was produced for a different network file");

  const auto method = verify::method_from_string(method_str);
  // verification must not reuse the training stream
  if (method == verify::Method::Mc && solution.contains("scenarios") &&
      solution["scenarios"].contains("seed") &&
      solution["scenarios"]["seed"].is_number_unsigned() &&
      solution["scenarios"]["seed"].get<std::uint64_t>() == seed &&
      solution["scenarios"]["source"] == "monte-carlo")
    throw InputError("verification seed equals the training seed; choose a fresh one");

  const auto table = verify::true_probability(net, u, points, method, seed);
  format::write_file(out_path, verify::probability_matrix_csv(table, net));

  ordered_json flat = ordered_json::array();
  for (const auto& e : table.entries)
    flat.push_back({{"from", e.from}, {"to", e.to}, {"probability", e.probability}});
  ordered_json pj;
  pj["tool"] = kToolVersion;
  pj["method"] = verify::to_string(table.method);
  pj["points"] = table.points;
  pj["seed"] = table.seed;
  pj["qmc_offset"] = table.qmc_offset;
  pj["feeders"] = flat;
  const std::string json_path = out_path + ".json";
  format::write_file(json_path, pj.dump(2) + "\n");

  ordered_json manifest = manifest_base("verify", timer);
  manifest["config"] = {{"network", network_path}, {"solution", solution_path},
                        {"points", points},        {"method", verify::to_string(method)},
                        {"seed", seed},            {"out", out_path}};
  manifest["inputs"] = {{"network_digest", network_digest},
                        {"solution_digest", format::file_digest(solution_path)},
                        {"training_provenance", solution.value("scenarios", nlohmann::json())},
                        {"verification_provenance",
                         {{"method", verify::to_string(table.method)},
                          {"seed", table.seed},
                          {"qmc_offset", table.qmc_offset}}}};
  manifest["outputs"] = {{"matrix_csv", out_path},
                         {"matrix_digest", format::file_digest(out_path)},
                         {"records_json", json_path}};
  write_manifest(manifest, out_path + ".manifest.json", timer);
  double min_prob = 1.0;
  for (const auto& e : table.entries) min_prob = std::min(min_prob, e.probability);
  std::cout << "minimum feeder probability " << min_prob << " over " << points << " points\n";
  return kExitOk;
}

int cmd_compare(const std::string& network_path, const std::string& scenarios_path,
                const std::string& stoch_path, const std::string& det_path,
                const std::string& out_dir) {
  Timer timer;
  const auto net = load_network_checked(network_path);
  const auto set = load_scenarios_checked(net, scenarios_path);

  const auto load_report = [&](const std::string& path) {
    if (!std::filesystem::exists(path)) throw InputError("report not found: " + path);
    nlohmann::json j;
    nlp::SolveReport rep;
    try {
      j = nlohmann::json::parse(format::read_file(path));
      rep.u_star = decision_from_json(j.at("decision"));
      rep.objective = j.at("objective_per_h").get<double>();
      rep.network_digest = j.at("network").at("digest").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed report " + path + ": " + e.what());
    }
    return rep;
  };
  const auto stoch = load_report(stoch_path);
  const auto det = load_report(det_path);
  const std::string network_digest = format::file_digest(network_path);
  if (stoch.network_digest != network_digest || det.network_digest != network_digest)
    throw InputError("reports reference a different network than " + network_path);

  std::filesystem::create_directories(out_dir);
  const auto cmp = verify::compare(net, set, stoch, det);
  const auto tb_stoch = verify::trajectories(net, stoch.u_star, set);
  const auto tb_det = verify::trajectories(net, det.u_star, set);

  const std::filesystem::path dir(out_dir);
  format::write_file(dir / "trajectories_stochastic.csv", verify::trajectory_csv(tb_stoch));
  format::write_file(dir / "trajectories_deterministic.csv", verify::trajectory_csv(tb_det));

  ordered_json summary;
  summary["tool"] = kToolVersion;
  summary["samples"] = cmp.sample_count;
  summary["stochastic"] = {{"objective_per_h", cmp.stochastic_objective},
                           {"decision", decision_json(stoch.u_star)}};
  summary["deterministic"] = {{"objective_per_h", cmp.deterministic_objective},
                              {"decision", decision_json(det.u_star)}};
  ordered_json feeders = ordered_json::array();
  for (const auto& f : cmp.feeders)
    feeders.push_back({{"from", f.from},
                       {"to", f.to},
                       {"alpha", f.alpha},
                       {"stochastic_violations", f.stochastic_violations},
                       {"deterministic_violations", f.deterministic_violations},
                       {"stochastic_rate", f.stochastic_rate},
                       {"deterministic_rate", f.deterministic_rate},
                       {"flagged", f.flagged}});
  summary["per_feeder"] = feeders;
  summary["flagged_feeders"] = cmp.flagged_count;
  format::write_file(dir / "summary.json", summary.dump(2) + "\n");

  ordered_json manifest = manifest_base("compare", timer);
  manifest["config"] = {{"network", network_path},
                        {"scenarios", scenarios_path},
                        {"stoch", stoch_path},
                        {"det", det_path},
                        {"out", out_dir}};
  manifest["inputs"] = {{"network_digest", network_digest},
                        {"scenario_digest", format::file_digest(scenarios_path)},
                        {"stoch_digest", format::file_digest(stoch_path)},
                        {"det_digest", format::file_digest(det_path)}};
  manifest["outputs"] = {
      {"trajectories_stochastic", (dir / "trajectories_stochastic.csv").string()},
      {"trajectories_deterministic", (dir / "trajectories_deterministic.csv").string()},
      {"summary", (dir / "summary.json").string()}};
  write_manifest(manifest, dir / "manifest.json", timer);
  std::cout << "flagged feeders: " << cmp.flagged_count << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained DC optimal power flow (inner-outer approximation)"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  std::string g_network, g_out, g_source = "mc";
  std::size_t g_count = 0;
  std::uint64_t g_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate a joint wind/demand scenario set");
  gen->add_option("--network", g_network, "network JSON file")->required();
  gen->add_option("--count", g_count, "number of scenarios")->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", g_seed, "random seed")->required();
  gen->add_option("--source", g_source, "mc|qmc")->check(CLI::IsMember({"mc", "qmc"}));
  gen->add_option("--out", g_out, "output CSV path")->required();

  // solve --------------------------------------------------------------
  std::string s_network, s_scenarios, s_variant = "cc", s_out;
  double s_alpha = -1.0;
  nlp::SolverConfig s_cfg;
  smoothing::SmoothingParams s_smoothing{0.5, 1.0, 1.0};
  double s_weight = 1e3;
  auto* solve = app.add_subcommand("solve", "solve the chance-constrained or deterministic OPF");
  solve->add_option("--network", s_network)->required();
  solve->add_option("--scenarios", s_scenarios, "scenario CSV (cc variant)");
  solve->add_option("--alpha", s_alpha, "override every feeder's probability level")
      ->check(CLI::Range(0.5, 1.0));
  solve->add_option("--tau0", s_cfg.tau0);
  solve->add_option("--tau-decay", s_cfg.tau_decay);
  solve->add_option("--tau-min", s_cfg.tau_min);
  solve->add_option("--m1", s_smoothing.m1);
  solve->add_option("--m2", s_smoothing.m2);
  solve->add_option("--penalty-weight", s_weight, "bound-penalty weight ($/h per MW^2)");
  solve->add_option("--inner-rhs-factor", s_cfg.inner_rhs_factor,
                    "certification buffer on (1-alpha)");
  solve->add_option("--constraint-tol", s_cfg.constraint_tol);
  solve->add_option("--stationarity-tol", s_cfg.stationarity_tol);
  solve->add_option("--bracket-gap-tol", s_cfg.bracket_gap_tol);
  solve->add_option("--max-outer", s_cfg.max_outer_iterations);
  solve->add_option("--max-inner", s_cfg.max_inner_iterations);
  solve->add_option("--variant", s_variant, "cc|det")->check(CLI::IsMember({"cc", "det"}));
  solve->add_option("--out", s_out)->required();

  // verify ---------------------------------------------------------------
  std::string v_network, v_solution, v_method = "qmc", v_out;
  std::size_t v_points = 1 << 16;
  std::uint64_t v_seed = 9001;
  auto* verify_cmd = app.add_subcommand("verify", "estimate true feeder probabilities");
  verify_cmd->add_option("--network", v_network)->required();
  verify_cmd->add_option("--solution", v_solution, "solve report JSON")->required();
  verify_cmd->add_option("--points", v_points)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--method", v_method, "qmc|mc")->check(CLI::IsMember({"qmc", "mc"}));
  verify_cmd->add_option("--seed", v_seed, "mc sampling seed");
  verify_cmd->add_option("--out", v_out, "matrix CSV path")->required();

  // compare --------------------------------------------------------------
  std::string c_network, c_scenarios, c_stoch, c_det, c_out;
  auto* compare_cmd =
      app.add_subcommand("compare", "stochastic vs deterministic trajectory comparison");
  compare_cmd->add_option("--network", c_network)->required();
  compare_cmd->add_option("--scenarios", c_scenarios)->required();
  compare_cmd->add_option("--stoch", c_stoch, "stochastic solve report")->required();
  compare_cmd->add_option("--det", c_det, "deterministic solve report")->required();
  compare_cmd->add_option("--out", c_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (gen->parsed()) return cmd_gen(g_network, g_count, g_seed, g_source, g_out);
    if (solve->parsed()) {
      if (s_variant == "cc" && s_scenarios.empty())
        throw InputError("--scenarios is required for the cc variant");
      std::optional<double> alpha;
      if (s_alpha >= 0.0) alpha = s_alpha;
      return cmd_solve(s_network, s_scenarios, alpha, s_cfg, s_smoothing, s_weight, s_variant,
                       s_out);
    }
    if (verify_cmd->parsed())
      return cmd_verify(v_network, v_solution, v_points, v_method, v_seed, v_out);
    if (compare_cmd->parsed())
      return cmd_compare(c_network, c_scenarios, c_stoch, c_det, c_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nlp::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const model::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const model::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const scenario::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
