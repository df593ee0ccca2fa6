#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/dcflow.hpp"
#include "ccopf/model.hpp"
#include "ccopf/scenario.hpp"
#include "ccopf/smoothing.hpp"

namespace ccopf::saa {

enum class Variant { Inner, Outer, Deterministic };

std::string to_string(Variant v);

struct ValueGrad {
  double value = 0.0;
  Eigen::VectorXd grad;
};

struct FeederMargin {
  double h = 0.0;  // |P| - P_max in MW
  Eigen::VectorXd grad;
};

struct FeederProbe {
  int from = 0, to = 0;
  double alpha = 0.0;
  double psi = 0.0;                // sample average of theta(tau, s)
  double phi = 0.0;                // sample average of theta(tau, -s)
  double violation_rate = 0.0;     // mean of indicator(h)
  double satisfaction_rate = 0.0;  // mean of indicator(-h)
  double min_abs_flow = 0.0;       // MW, kink proximity
};

struct BoundAudit {
  std::size_t angle_violations = 0;  // per-sample, per-bus count
  std::size_t slack_violations = 0;  // per-sample count
  double worst_angle_excess = 0.0;   // rad
  double worst_slack_excess = 0.0;   // MW
};

// Sample-average OPF with smoothed per-feeder chance constraints.  Feeder
// margins are measured relative to the limit (s = (|P|-Pmax)/(Pmax/20)) so a
// single dimensionless tau schedule acts uniformly across feeders.
inline constexpr double kMarginScaleDivisor = 20.0;

class AssembledProblem {
 public:
  AssembledProblem(const model::Network& net, const scenario::ScenarioSet& set, Variant variant,
                   smoothing::SmoothingParams params, double penalty_weight = 1e3);
  AssembledProblem(AssembledProblem&&) noexcept;
  AssembledProblem& operator=(AssembledProblem&&) noexcept;
  ~AssembledProblem();

  const model::Network& network() const { return net_; }
  const dcflow::DecisionLayout& layout() const { return model_.layout(); }
  const scenario::ScenarioSet& scenarios() const { return set_; }
  Variant variant() const { return variant_; }
  smoothing::SmoothingParams smoothing_params() const { return params_; }
  double penalty_weight() const { return penalty_weight_; }
  std::size_t sample_count() const { return static_cast<std::size_t>(n_); }

  void set_tau(double tau);
  // Certification buffer: the inner constraint is psi <= factor*(1-alpha).
  void set_inner_rhs_factor(double factor);
  // Diagnostic override of every feeder's probability level.
  void set_alpha_override(double alpha);
  void clear_alpha_override();

  Eigen::VectorXd lower_bounds() const;
  Eigen::VectorXd upper_bounds() const;
  Eigen::VectorXd default_start() const;  // beta_w = 1, generators at box midpoints

  int constraint_count() const { return static_cast<int>(net_.feeders.size()); }
  double feeder_alpha(int feeder) const;

  struct Evaluation {
    double objective = 0.0;  // $/h, economic part
    Eigen::VectorXd objective_grad;
    double penalty_raw = 0.0;  // squared-hinge bound violations (MW^2 + rad^2)
    Eigen::VectorXd penalty_grad_raw;
    double merit = 0.0;  // objective + penalty_weight * penalty_raw
    Eigen::VectorXd merit_grad;
    Eigen::VectorXd constraints;       // c_j(u) <= 0
    Eigen::MatrixXd constraint_grads;  // m x dim
    Eigen::VectorXd min_abs_flow;      // MW per feeder
  };
  // Fused scenario sweep; parallel over scenarios with a fixed pairwise
  // reduction, so results are bitwise independent of the worker count.
  // Uses internal scratch: not safe to call concurrently on one instance.
  Evaluation evaluate(const Eigen::VectorXd& u) const;

  // Reporting probes (independent of the variant).
  std::vector<FeederProbe> probe(const Eigen::VectorXd& u) const;
  ValueGrad objective(const Eigen::VectorXd& u) const;
  ValueGrad psi(const Eigen::VectorXd& u, int feeder) const;
  ValueGrad phi(const Eigen::VectorXd& u, int feeder) const;
  ValueGrad bound_penalty(const Eigen::VectorXd& u) const;  // raw units
  BoundAudit bound_audit(const Eigen::VectorXd& u) const;

 private:
  struct Scratch;
  void flows_for(const Eigen::VectorXd& u, int feeder, Eigen::ArrayXd& out) const;
  Eigen::ArrayXd slack_series(const Eigen::VectorXd& u) const;

  model::Network net_;
  scenario::ScenarioSet set_;
  dcflow::FlowModel model_;
  Variant variant_;
  smoothing::SmoothingParams params_;
  double penalty_weight_;
  double inner_rhs_factor_ = 1.0;
  double alpha_override_ = -1.0;  // < 0 means none

  Eigen::Index n_ = 0;
  int dim_ = 0;
  Eigen::MatrixXd wind_coef_;    // F x W ptdf columns at wind buses
  Eigen::MatrixXd gen_coef_;     // F x G
  Eigen::MatrixXd load_flow_;    // N x F flow from loads only
  Eigen::MatrixXd angle_wind_;   // Nb x W
  Eigen::MatrixXd angle_gen_;    // Nb x G
  Eigen::MatrixXd angle_load_;   // N x Nb angle from loads only
  Eigen::VectorXd load_total_;   // N
  Eigen::VectorXd scale_;        // F margin scales
  Eigen::VectorXd p_max_;        // F
  double mean_load_total_ = 0.0;
  Eigen::VectorXd mean_wind_;    // W
  bool angles_can_bind_ = true;
  std::unique_ptr<Scratch> scratch_;
};

// Spec-level operations (thin wrappers over the evaluator).
ValueGrad objective(const model::Network& net, const dcflow::Decision& u,
                    const scenario::ScenarioSet& set);
FeederMargin feeder_margin(const model::Network& net, const dcflow::Decision& u,
                           const scenario::Scenario& s, int feeder);
ValueGrad psi_inner(const model::Network& net, const dcflow::Decision& u,
                    const scenario::ScenarioSet& set, int feeder,
                    const smoothing::SmoothingParams& p);
ValueGrad phi_outer(const model::Network& net, const dcflow::Decision& u,
                    const scenario::ScenarioSet& set, int feeder,
                    const smoothing::SmoothingParams& p);
ValueGrad bound_penalty(const model::Network& net, const dcflow::Decision& u,
                        const scenario::ScenarioSet& set);
AssembledProblem assemble(const model::Network& net, const scenario::ScenarioSet& set,
                          Variant variant, smoothing::SmoothingParams params,
                          double penalty_weight = 1e3);

}  // namespace ccopf::saa
