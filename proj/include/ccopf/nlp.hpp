#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/saa.hpp"

namespace ccopf::nlp {

struct SolverConfig {
  int max_outer_iterations = 30;   // multiplier updates
  int max_inner_iterations = 300;  // quasi-Newton steps per outer pass
  double constraint_tol = 1e-5;    // on psi/phi slack
  double stationarity_tol = 1e-4;  // projected-gradient norm, scaled box
  double penalty_initial = 1.0;    // scaled by the objective magnitude
  double penalty_growth = 10.0;
  double tau0 = 0.5;
  double tau_decay = 0.5;
  double tau_min = 1e-3;
  double bracket_gap_tol = 1e-4;   // relative objective gap
  double inner_rhs_factor = 0.9;   // certification buffer on (1 - alpha)

  void validate() const;
};

enum class Status { Converged, MaxIterations, Infeasible };

std::string to_string(Status s);

// Thrown when the inner problem has no feasible point; carries the largest
// probability level for which a feasible point was found (diagnostic).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& msg, std::optional<double> largest_alpha)
      : std::runtime_error(msg), largest_feasible_alpha(largest_alpha) {}
  std::optional<double> largest_feasible_alpha;
};

// Gradient-only boxed problem with smooth inequality constraints c(u) <= 0.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd lower_bounds() const = 0;
  virtual Eigen::VectorXd upper_bounds() const = 0;
  virtual int constraint_count() const = 0;
  virtual void evaluate(const Eigen::VectorXd& u, double& f, Eigen::VectorXd& grad,
                        Eigen::VectorXd& c, Eigen::MatrixXd& jac) const = 0;
};

struct MinimizeResult {
  Eigen::VectorXd u;
  double objective = 0.0;  // merit objective of the Problem
  Eigen::VectorXd constraints;
  Status status = Status::MaxIterations;
  int inner_iterations = 0;
  int outer_iterations = 0;
  double stationarity = 0.0;
  double max_violation = 0.0;
};

// Optional multiplier carry-over between related solves (the tau chain).
struct MultiplierState {
  Eigen::VectorXd lambda;
};

// Augmented-Lagrangian outer loop with a projected quasi-Newton inner loop;
// boxes handled by projection, deterministic for fixed inputs.
MinimizeResult minimize(const Problem& problem, const Eigen::VectorXd& u0,
                        const SolverConfig& cfg, MultiplierState* warm = nullptr);

struct SolveReport {
  saa::Variant variant = saa::Variant::Inner;
  dcflow::Decision u_star;
  Eigen::VectorXd u_packed;
  double objective = 0.0;    // $/h economic objective at u_star
  double penalty_raw = 0.0;  // bound-penalty value at u_star
  double merit = 0.0;
  std::vector<saa::FeederProbe> per_feeder;
  saa::BoundAudit audit;
  int inner_iterations = 0;
  int outer_iterations = 0;
  std::vector<double> tau_trace;
  std::optional<std::pair<double, double>> bracket;  // (obj_outer, obj_inner)
  double wall_seconds = 0.0;
  Status status = Status::MaxIterations;
  std::string network_digest;  // set by callers that know the source file
};

// Solves one assembled variant and reports at its solution.
SolveReport minimize(const saa::AssembledProblem& problem, const Eigen::VectorXd& u0,
                     const SolverConfig& cfg);

struct TauStep {
  double tau = 0.0;
  double objective_outer = 0.0;
  double objective_inner = 0.0;
  double relative_gap = 0.0;
};

struct ContinuationResult {
  SolveReport inner;  // certified (feasible-side) solution
  SolveReport outer;  // lower-bound solution
  std::vector<TauStep> trace;
  double final_gap = 0.0;
  std::vector<std::string> warnings;
};

// Solves the OA/IA pair along the decreasing tau schedule, warm-starting OA
// from the previous tau and IA from the current OA solution.
ContinuationResult continuation_solve(const model::Network& net,
                                      const scenario::ScenarioSet& set,
                                      smoothing::SmoothingParams p0, const SolverConfig& cfg,
                                      double penalty_weight = 1e3);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::vector<int> skipped_feeders;  // kinked (some |P| ~ 0) and excluded
  std::vector<std::pair<std::string, double>> per_evaluator;
};

// Central finite differences against analytic gradients for the objective,
// every constraint, and the bound penalty.
GradCheckResult grad_check(const saa::AssembledProblem& problem, const Eigen::VectorXd& u,
                           double step);

}  // namespace ccopf::nlp
