#include "ccopf/nlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>

namespace ccopf::nlp {

void SolverConfig::validate() const {
  if (max_outer_iterations < 1 || max_inner_iterations < 1)
    throw std::invalid_argument("iteration limits must be positive");
  if (!(constraint_tol > 0.0) || !(stationarity_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(penalty_initial > 0.0) || !(penalty_growth > 1.0))
    throw std::invalid_argument("penalty parameters must be positive (growth > 1)");
  if (!(tau_decay > 0.0 && tau_decay < 1.0)) throw std::invalid_argument("tau decay must lie in (0,1)");
  if (!(tau_min > 0.0 && tau_min < tau0 && tau0 < 1.0))
    throw std::invalid_argument("tau schedule requires 0 < tau_min < tau0 < 1");
  if (!(bracket_gap_tol > 0.0)) throw std::invalid_argument("bracket gap tolerance must be positive");
  if (!(inner_rhs_factor > 0.0 && inner_rhs_factor <= 1.0))
    throw std::invalid_argument("inner rhs factor must lie in (0,1]");
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIterations: return "max-iterations";
    case Status::Infeasible: return "infeasible";
  }
  return "?";
}

namespace {

struct AugmentedEval {
  double merit = 0.0;         // augmented Lagrangian value
  double f = 0.0;             // problem objective
  Eigen::VectorXd grad;       // d merit / du
  Eigen::VectorXd c;
};

class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const Problem& p, const Eigen::VectorXd& lambda, double mu)
      : p_(p), lambda_(lambda), mu_(mu) {}

  AugmentedEval operator()(const Eigen::VectorXd& u) const {
    AugmentedEval ev;
    Eigen::VectorXd grad_f;
    Eigen::MatrixXd jac;
    p_.evaluate(u, ev.f, grad_f, ev.c, jac);
    ev.merit = ev.f;
    ev.grad = grad_f;
    for (int j = 0; j < ev.c.size(); ++j) {
      const double t = lambda_(j) + mu_ * ev.c(j);
      if (t > 0.0) {
        ev.merit += (t * t - lambda_(j) * lambda_(j)) / (2.0 * mu_);
        ev.grad += t * jac.row(j).transpose();
      } else {
        ev.merit -= lambda_(j) * lambda_(j) / (2.0 * mu_);
      }
    }
    return ev;
  }

 private:
  const Problem& p_;
  const Eigen::VectorXd& lambda_;
  double mu_;
};

// Pure infeasibility measure sum(max(0, c))^2, used to restore a feasible
// point when the multiplier loop stalls on a nonconvex constraint set.
class RestorationObjective {
 public:
  explicit RestorationObjective(const Problem& p) : p_(p) {}

  AugmentedEval operator()(const Eigen::VectorXd& u) const {
    AugmentedEval ev;
    Eigen::VectorXd grad_f;
    Eigen::MatrixXd jac;
    double f;
    p_.evaluate(u, f, grad_f, ev.c, jac);
    ev.f = 0.0;
    ev.grad = Eigen::VectorXd::Zero(u.size());
    for (int j = 0; j < ev.c.size(); ++j) {
      if (ev.c(j) > 0.0) {
        ev.f += ev.c(j) * ev.c(j);
        ev.grad += 2.0 * ev.c(j) * jac.row(j).transpose();
      }
    }
    ev.merit = ev.f;
    return ev;
  }

 private:
  const Problem& p_;
};

struct SpgOutcome {
  Eigen::VectorXd x;
  AugmentedEval ev;
  int iterations = 0;
  double pg_norm = 0.0;
  bool stationary = false;
};

// Projected quasi-Newton descent on [0,1]^d (scaled box): dense BFGS on the
// low-dimensional decision vector with a projected Armijo line search and a
// spectral fallback step when curvature information is unusable.
template <typename Merit>
SpgOutcome spg_minimize(const Merit& L, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& span, Eigen::VectorXd x, int max_iters,
                        double rel_tol) {
  const auto project = [](Eigen::VectorXd v) {
    for (int i = 0; i < v.size(); ++i) v(i) = std::clamp(v(i), 0.0, 1.0);
    return v;
  };
  const auto unscale = [&](const Eigen::VectorXd& xs) -> Eigen::VectorXd {
    return lo + xs.cwiseProduct(span);
  };
  const int d = static_cast<int>(x.size());

  x = project(x);
  AugmentedEval ev = L(unscale(x));
  Eigen::VectorXd g = ev.grad.cwiseProduct(span);

  double eta = 1.0 / std::max(g.cwiseAbs().maxCoeff(), 1e-12);
  eta = std::clamp(eta, 1e-10, 1e10);
  Eigen::MatrixXd H = eta * Eigen::MatrixXd::Identity(d, d);
  double ls_start = 1.0;  // carried across iterations: stiff stretches stop
                          // re-paying the same backtracking cascade
  std::deque<double> recent_merits{ev.merit};

  SpgOutcome out;

  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd dir = -(H * g);
    if (g.dot(dir) >= -1e-14 * g.norm() * dir.norm()) {
      H = eta * Eigen::MatrixXd::Identity(d, d);  // curvature unusable, reset
      dir = -eta * g;
    }

    // stationarity needs both curvature-scaled measures small: the spectral
    // step alone underestimates the remaining progress along flat valleys
    // when the last observed curvature came from a stiff direction
    const double pg_eta = (project(x - eta * g) - x).cwiseAbs().maxCoeff();
    const double pg_dir = (project(x + dir) - x).cwiseAbs().maxCoeff();
    out.pg_norm = std::max(pg_eta, pg_dir);
    if (out.pg_norm <= rel_tol) {
      out.stationary = true;
      break;
    }
    if (recent_merits.size() >= 12 &&
        recent_merits.front() - ev.merit <= 1e-12 * std::max(1.0, std::abs(ev.merit))) {
      out.stationary = true;  // merit progress exhausted at working precision
      break;
    }

    double step = ls_start;
    Eigen::VectorXd x_new;
    AugmentedEval ev_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = project(x + step * dir);
      const Eigen::VectorXd s = x_new - x;
      if (s.cwiseAbs().maxCoeff() <= 1e-18) break;
      const double pred = g.dot(s);
      if (pred < 0.0) {
        ev_new = L(unscale(x_new));
        ++out.iterations;
        if (ev_new.merit <= ev.merit + 1e-4 * pred) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (accepted) ls_start = std::min(1.0, step * 2.0);
    if (!accepted) {
      // quasi-Newton direction failed; one safeguarded spectral step
      step = 1.0;
      for (int ls = 0; ls < 50 && !accepted; ++ls) {
        x_new = project(x - step * eta * g);
        const Eigen::VectorXd s = x_new - x;
        if (s.cwiseAbs().maxCoeff() <= 1e-18) break;
        const double pred = g.dot(s);
        if (pred < 0.0) {
          ev_new = L(unscale(x_new));
          ++out.iterations;
          if (ev_new.merit <= ev.merit + 1e-4 * pred) accepted = true;
        }
        if (!accepted) step *= 0.5;
      }
      H = eta * Eigen::MatrixXd::Identity(d, d);
    }
    if (!accepted) {
      // neither direction yields descent at floating-point resolution
      out.stationary = true;
      break;
    }

    const Eigen::VectorXd g_new = ev_new.grad.cwiseProduct(span);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd Hy = H * y;
      const double yHy = y.dot(Hy);
      // BFGS update of the inverse Hessian
      H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
           (Hy * s.transpose() + s * Hy.transpose()) / sy;
      eta = std::clamp(sy / y.dot(y), 1e-10, 1e10);
    }

    x = x_new;
    ev = ev_new;
    g = g_new;
    recent_merits.push_back(ev.merit);
    if (recent_merits.size() > 12) recent_merits.pop_front();
  }

  out.x = x;
  out.ev = ev;
  return out;
}

}  // namespace

namespace {

struct BoxScaling {
  Eigen::VectorXd lo;
  Eigen::VectorXd span;
};

BoxScaling box_scaling(const Problem& problem) {
  BoxScaling b;
  b.lo = problem.lower_bounds();
  b.span = problem.upper_bounds() - b.lo;
  for (int i = 0; i < b.span.size(); ++i) {
    if (b.span(i) < 0.0) throw std::invalid_argument("inconsistent box bounds");
    if (b.span(i) == 0.0) b.span(i) = 1.0;  // pinned variable, projection keeps it fixed
  }
  return b;
}

MinimizeResult alm_attempt(const Problem& problem, const BoxScaling& box, Eigen::VectorXd x,
                           const SolverConfig& cfg, Eigen::VectorXd lambda,
                           Eigen::VectorXd* lambda_out) {
  const int m = problem.constraint_count();
  if (lambda.size() != m) lambda = Eigen::VectorXd::Zero(m);

  // scale the penalty to the objective magnitude so the first inner solves
  // already feel the constraints
  double f0;
  {
    Eigen::VectorXd g0, c0;
    Eigen::MatrixXd j0;
    problem.evaluate(box.lo + x.cwiseProduct(box.span), f0, g0, c0, j0);
  }
  double mu = cfg.penalty_initial * std::max(1.0, std::abs(f0));

  MinimizeResult res;
  res.status = Status::MaxIterations;
  double viol_prev = std::numeric_limits<double>::infinity();
  double f_prev = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  bool have_best = false;
  Eigen::VectorXd best_x;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    // inner tolerance tightens with the outer iteration
    const double rel_tol = std::max(cfg.stationarity_tol, 1e-2 * std::pow(0.2, outer));
    AugmentedLagrangian L(problem, lambda, mu);
    SpgOutcome spg = spg_minimize(L, box.lo, box.span, x, cfg.max_inner_iterations, rel_tol);
    x = spg.x;
    res.inner_iterations += spg.iterations;
    res.outer_iterations = outer + 1;
    res.stationarity = spg.pg_norm;

    const Eigen::VectorXd& c = spg.ev.c;
    const double viol = m > 0 ? c.cwiseMax(0.0).maxCoeff() : 0.0;
    res.max_violation = viol;

    if (viol <= cfg.constraint_tol && spg.ev.f <= best_merit) {
      best_merit = spg.ev.f;
      best_x = x;
      have_best = true;
    }

    // exit only once two consecutive multiplier updates agree on the merit,
    // otherwise the inner exits can outrun the dual variables
    const bool tight = rel_tol <= cfg.stationarity_tol * (1.0 + 1e-12);
    const bool settled = std::abs(spg.ev.f - f_prev) <= 1e-6 * std::max(1.0, std::abs(spg.ev.f));
    f_prev = spg.ev.f;
    if (viol <= cfg.constraint_tol && spg.stationary && tight && settled) {
      res.status = Status::Converged;
      break;
    }

    if (m > 0) {
      for (int j = 0; j < m; ++j) lambda(j) = std::max(0.0, lambda(j) + mu * c(j));
      if (viol > 0.25 * viol_prev && viol > cfg.constraint_tol) {
        mu = std::min(mu * cfg.penalty_growth, 1e16);
        stagnant = viol > 0.999 * viol_prev ? stagnant + 1 : 0;
      } else {
        stagnant = 0;
      }
      if (mu >= 1e14 && stagnant >= 3 && viol > 100.0 * cfg.constraint_tol) {
        res.status = Status::Infeasible;
        break;
      }
      viol_prev = viol;
    }
  }

  // a feasible incumbent beats an infeasible terminal iterate
  if (res.status != Status::Converged && have_best) {
    x = best_x;
    if (res.status == Status::Infeasible) res.status = Status::MaxIterations;
  }
  res.u = box.lo + x.cwiseProduct(box.span);
  Eigen::VectorXd g, c;
  Eigen::MatrixXd jac;
  problem.evaluate(res.u, res.objective, g, c, jac);
  res.constraints = c;
  if (c.size() > 0) res.max_violation = c.cwiseMax(0.0).maxCoeff();
  if (lambda_out != nullptr) *lambda_out = lambda;
  return res;
}

}  // namespace

MinimizeResult minimize(const Problem& problem, const Eigen::VectorXd& u0,
                        const SolverConfig& cfg, MultiplierState* warm) {
  cfg.validate();
  if (u0.size() != problem.dim()) throw std::invalid_argument("starting point has wrong dimension");
  const BoxScaling box = box_scaling(problem);
  const auto to_scaled = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return ((u - box.lo).cwiseQuotient(box.span)).cwiseMax(0.0).cwiseMin(1.0);
  };

  Eigen::VectorXd x = to_scaled(u0);
  Eigen::VectorXd lambda0 =
      warm != nullptr ? warm->lambda : Eigen::VectorXd::Zero(problem.constraint_count());
  Eigen::VectorXd lambda_final;
  MinimizeResult res;
  for (int attempt = 0;; ++attempt) {
    const int iters_so_far = res.inner_iterations;
    res = alm_attempt(problem, box, x, cfg, lambda0, &lambda_final);
    res.inner_iterations += iters_so_far;
    lambda0 = Eigen::VectorXd::Zero(problem.constraint_count());  // retries start clean
    if (res.max_violation <= cfg.constraint_tol || attempt >= 2) {
      if (res.max_violation > cfg.constraint_tol) res.status = Status::Infeasible;
      break;
    }

    // the multiplier loop stalled while violating constraints; look for any
    // feasible point by minimizing the infeasibility measure directly
    const RestorationObjective infeas(problem);
    const Eigen::VectorXd restart = attempt == 0 ? to_scaled(res.u) : to_scaled(u0);
    SpgOutcome rest = spg_minimize(infeas, box.lo, box.span, restart,
                                   2 * cfg.max_inner_iterations,
                                   std::min(cfg.stationarity_tol, 1e-8));
    res.inner_iterations += rest.iterations;
    const double viol = rest.ev.c.size() > 0 ? rest.ev.c.cwiseMax(0.0).maxCoeff() : 0.0;
    if (viol > cfg.constraint_tol) {
      // local minimum of the infeasibility measure is still violated
      res.u = box.lo + rest.x.cwiseProduct(box.span);
      res.constraints = rest.ev.c;
      res.max_violation = viol;
      res.status = Status::Infeasible;
      Eigen::VectorXd g;
      Eigen::MatrixXd jac;
      Eigen::VectorXd c_final;
      problem.evaluate(res.u, res.objective, g, c_final, jac);
      break;
    }
    x = rest.x;  // feasible point found, rerun the multiplier loop from it
  }
  if (warm != nullptr) warm->lambda = lambda_final;
  return res;
}

namespace {

class SaaProblemAdapter final : public Problem {
 public:
  explicit SaaProblemAdapter(const saa::AssembledProblem& p) : p_(p) {}
  int dim() const override { return p_.layout().dim(); }
  Eigen::VectorXd lower_bounds() const override { return p_.lower_bounds(); }
  Eigen::VectorXd upper_bounds() const override { return p_.upper_bounds(); }
  int constraint_count() const override { return p_.constraint_count(); }
  void evaluate(const Eigen::VectorXd& u, double& f, Eigen::VectorXd& grad, Eigen::VectorXd& c,
                Eigen::MatrixXd& jac) const override {
    const auto ev = p_.evaluate(u);
    f = ev.merit;
    grad = ev.merit_grad;
    c = ev.constraints;
    jac = ev.constraint_grads;
  }

 private:
  const saa::AssembledProblem& p_;
};

SolveReport report_at(const saa::AssembledProblem& problem, const MinimizeResult& mr) {
  SolveReport rep;
  rep.variant = problem.variant();
  rep.u_packed = mr.u;
  rep.u_star = problem.layout().unpack(mr.u);
  const auto ev = problem.evaluate(mr.u);
  rep.objective = ev.objective;
  rep.penalty_raw = ev.penalty_raw;
  rep.merit = ev.merit;
  rep.per_feeder = problem.probe(mr.u);
  rep.audit = problem.bound_audit(mr.u);
  rep.inner_iterations = mr.inner_iterations;
  rep.outer_iterations = mr.outer_iterations;
  rep.status = mr.status;
  return rep;
}

}  // namespace

SolveReport minimize(const saa::AssembledProblem& problem, const Eigen::VectorXd& u0,
                     const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SaaProblemAdapter adapter(problem);
  MinimizeResult mr = minimize(adapter, u0, cfg);
  SolveReport rep = report_at(problem, mr);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

std::vector<double> tau_schedule(const SolverConfig& cfg) {
  std::vector<double> taus;
  double t = cfg.tau0;
  while (t > cfg.tau_min) {
    taus.push_back(t);
    t *= cfg.tau_decay;
  }
  taus.push_back(cfg.tau_min);
  return taus;
}

// Diagnostic bisection: the largest uniform alpha for which the inner problem
// still admits a feasible point at this tau.
std::optional<double> bisect_feasible_alpha(saa::AssembledProblem& inner,
                                            const Eigen::VectorXd& start,
                                            const SolverConfig& cfg, double alpha_hi) {
  SaaProblemAdapter adapter(inner);
  SolverConfig probe_cfg = cfg;
  probe_cfg.max_outer_iterations = std::max(10, cfg.max_outer_iterations / 2);
  double lo = 0.5, hi = alpha_hi;
  inner.set_alpha_override(lo);
  if (minimize(adapter, start, probe_cfg).status == Status::Infeasible) {
    inner.clear_alpha_override();
    return std::nullopt;
  }
  for (int it = 0; it < 12; ++it) {
    const double mid = 0.5 * (lo + hi);
    inner.set_alpha_override(mid);
    const bool ok = minimize(adapter, start, probe_cfg).status != Status::Infeasible;
    (ok ? lo : hi) = mid;
  }
  inner.clear_alpha_override();
  return lo;
}

}  // namespace

ContinuationResult continuation_solve(const model::Network& net,
                                      const scenario::ScenarioSet& set,
                                      smoothing::SmoothingParams p0, const SolverConfig& cfg,
                                      double penalty_weight) {
  cfg.validate();
  if (!p0.valid() || !p0.is_majorant())
    throw std::invalid_argument("continuation requires valid smoothing parameters with m1 >= m2");
  const auto t0 = std::chrono::steady_clock::now();

  saa::AssembledProblem outer(net, set, saa::Variant::Outer, p0, penalty_weight);
  saa::AssembledProblem inner(net, set, saa::Variant::Inner, p0, penalty_weight);
  inner.set_inner_rhs_factor(cfg.inner_rhs_factor);
  SaaProblemAdapter outer_adapter(outer);
  SaaProblemAdapter inner_adapter(inner);

  ContinuationResult result;
  Eigen::VectorXd u_outer = outer.default_start();
  MinimizeResult mr_outer, mr_inner;
  MultiplierState warm_outer, warm_inner;
  int total_inner_iters = 0, total_outer_iters = 0;

  const std::vector<double> taus = tau_schedule(cfg);
  std::vector<double> taus_run;
  for (double tau : taus) {
    outer.set_tau(tau);
    inner.set_tau(tau);
    taus_run.push_back(tau);

    mr_outer = minimize(outer_adapter, u_outer, cfg, &warm_outer);
    u_outer = mr_outer.u;
    total_inner_iters += mr_outer.inner_iterations;
    total_outer_iters += mr_outer.outer_iterations;
    if (mr_outer.status == Status::Infeasible) {
      std::ostringstream msg;
      msg << "outer approximation infeasible at tau=" << tau;
      throw InfeasibleError(msg.str(), std::nullopt);
    }

    mr_inner = minimize(inner_adapter, u_outer, cfg, &warm_inner);
    total_inner_iters += mr_inner.inner_iterations;
    total_outer_iters += mr_inner.outer_iterations;
    if (mr_inner.status == Status::Infeasible) {
      const auto largest = bisect_feasible_alpha(inner, u_outer, cfg, 1.0);
      std::ostringstream msg;
      msg << "inner approximation infeasible at tau=" << tau;
      if (largest)
        msg << "; largest feasible alpha ~= " << *largest;
      else
        msg << "; no feasible alpha found down to 0.5";
      throw InfeasibleError(msg.str(), largest);
    }

    TauStep step;
    step.tau = tau;
    step.objective_outer = mr_outer.objective;  // merit; penalty ~ 0 at solutions
    step.objective_inner = mr_inner.objective;
    step.relative_gap = (step.objective_inner - step.objective_outer) /
                        std::max(1.0, std::abs(step.objective_inner));
    result.trace.push_back(step);

    if (step.objective_outer > step.objective_inner +
                                   10.0 * cfg.stationarity_tol *
                                       std::max(1.0, std::abs(step.objective_inner))) {
      std::ostringstream warn;
      warn << "non-monotone bracket at tau=" << tau << " (outer " << step.objective_outer
           << " > inner " << step.objective_inner << ")";
      result.warnings.push_back(warn.str());
    }
    if (step.relative_gap <= cfg.bracket_gap_tol) break;
  }

  result.final_gap = result.trace.back().relative_gap;

  result.outer = report_at(outer, mr_outer);
  result.inner = report_at(inner, mr_inner);
  result.inner.tau_trace = taus_run;
  result.outer.tau_trace = taus_run;
  result.inner.bracket = {result.trace.back().objective_outer,
                          result.trace.back().objective_inner};
  result.outer.bracket = result.inner.bracket;
  result.inner.inner_iterations = total_inner_iters;
  result.inner.outer_iterations = total_outer_iters;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.inner.wall_seconds = wall;
  result.outer.wall_seconds = wall;
  return result;
}

GradCheckResult grad_check(const saa::AssembledProblem& problem, const Eigen::VectorXd& u,
                           double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const Eigen::VectorXd lo = problem.lower_bounds();
  const Eigen::VectorXd hi = problem.upper_bounds();
  for (int k = 0; k < u.size(); ++k)
    if (u(k) - step < lo(k) || u(k) + step > hi(k))
      throw std::invalid_argument("u must be interior to the box by at least the step");

  const auto center = problem.evaluate(u);
  const int m = problem.constraint_count();
  const int d = problem.layout().dim();

  // a feeder whose flow passes through 0 in some sample sits on the |P| kink
  const double kink_tol = std::max(1e-6, 1e3 * step);
  GradCheckResult res;
  for (int f = 0; f < m; ++f)
    if (center.min_abs_flow(f) <= kink_tol) res.skipped_feeders.push_back(f);

  Eigen::VectorXd obj_fd(d), pen_fd(d);
  Eigen::MatrixXd con_fd(m, d);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd up = u, dn = u;
    up(k) += step;
    dn(k) -= step;
    const auto e_up = problem.evaluate(up);
    const auto e_dn = problem.evaluate(dn);
    obj_fd(k) = (e_up.objective - e_dn.objective) / (2.0 * step);
    pen_fd(k) = (e_up.penalty_raw - e_dn.penalty_raw) / (2.0 * step);
    for (int f = 0; f < m; ++f)
      con_fd(f, k) = (e_up.constraints(f) - e_dn.constraints(f)) / (2.0 * step);
  }

  // components below 1e-3 (box-scaled problems put meaningful gradients well
  // above this) are compared absolutely, otherwise central differences of a
  // saturated constraint measure nothing but summation noise
  const auto rel_err = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double worst = 0.0;
    for (int k = 0; k < a.size(); ++k) {
      const double denom = std::max({std::abs(a(k)), std::abs(b(k)), 1e-3});
      worst = std::max(worst, std::abs(a(k) - b(k)) / denom);
    }
    return worst;
  };

  res.per_evaluator.emplace_back("objective", rel_err(center.objective_grad, obj_fd));
  res.per_evaluator.emplace_back("bound_penalty", rel_err(center.penalty_grad_raw, pen_fd));
  for (int f = 0; f < m; ++f) {
    const bool skipped =
        std::find(res.skipped_feeders.begin(), res.skipped_feeders.end(), f) !=
        res.skipped_feeders.end();
    if (skipped) continue;
    const Eigen::VectorXd a = center.constraint_grads.row(f).transpose();
    const Eigen::VectorXd b = con_fd.row(f).transpose();
    res.per_evaluator.emplace_back("constraint_" + std::to_string(f), rel_err(a, b));
  }
  for (const auto& [name, err] : res.per_evaluator) res.max_rel_error = std::max(res.max_rel_error, err);
  return res;
}

}  // namespace ccopf::nlp
