#include "ccopf/saa.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccopf/parallel.hpp"

namespace ccopf::saa {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Inner: return "inner";
    case Variant::Outer: return "outer";
    case Variant::Deterministic: return "deterministic";
  }
  return "?";
}

namespace {
struct ThetaPair {
  double value;
  double ds;
};

// Mirrors smoothing::theta / theta_ds exactly while sharing one exponential.
// The exponent is clamped ahead of the call: glibc's exp takes a slow path on
// deep-underflow arguments, which dominates the sweep at small tau.
inline double fast_exp_neg(double arg) {  // arg <= 0
  return arg <= -708.0 ? 0.0 : std::exp(arg);
}

inline ThetaPair theta_pair(const smoothing::SmoothingParams& p, double s) {
  // value floored at the smallest normal double like smoothing::theta; the
  // slope is left unfloored so saturated samples contribute exact zeros to
  // the gradient buffers instead of subnormals
  constexpr double kFloor = std::numeric_limits<double>::min();
  const double num = 1.0 + p.m1 * p.tau;
  if (s >= 0.0) {
    const double e = fast_exp_neg(-s / p.tau);
    const double d = 1.0 + p.m2 * p.tau * e;
    return {num / d, (num * p.m2) * e / (d * d)};
  }
  const double e = fast_exp_neg(s / p.tau);
  const double d = e + p.m2 * p.tau;
  return {std::max(num * e / d, kFloor), (num * p.m2) * e / (d * d)};
}

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::span<const double> col_span(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.col(c).data(), static_cast<std::size_t>(m.rows())};
}
}  // namespace

struct AssembledProblem::Scratch {
  Eigen::MatrixXd th;       // N x F kernel values (or margins for Deterministic)
  Eigen::MatrixXd dsig;     // N x F kernel slope * sign / scale
  Eigen::MatrixXd absflow;  // N x F
  Eigen::MatrixXd wgrad;    // N x (F*W)
  Eigen::VectorXd pen;      // N
  Eigen::MatrixXd pengrad;  // N x dim
};

AssembledProblem::AssembledProblem(AssembledProblem&&) noexcept = default;
AssembledProblem& AssembledProblem::operator=(AssembledProblem&&) noexcept = default;
AssembledProblem::~AssembledProblem() = default;

AssembledProblem::AssembledProblem(const model::Network& net, const scenario::ScenarioSet& set,
                                   Variant variant, smoothing::SmoothingParams params,
                                   double penalty_weight)
    : net_(net),
      set_(variant == Variant::Deterministic ? scenario::forecast_scenarios(net) : set),
      model_(net),
      variant_(variant),
      params_(params),
      penalty_weight_(penalty_weight) {
  if (!params_.valid()) throw std::invalid_argument("invalid smoothing parameters");
  if (variant_ != Variant::Deterministic) scenario::validate_schema(net_, set_);
  if (penalty_weight_ < 0.0) throw std::invalid_argument("penalty weight must be nonnegative");

  n_ = static_cast<Eigen::Index>(set_.count());
  dim_ = layout().dim();
  const int nf = constraint_count();
  const int nb = model_.bus_count();
  const int nw = layout().wind_count();
  const int ng = layout().gen_count();

  wind_coef_.resize(nf, nw);
  gen_coef_.resize(nf, ng);
  angle_wind_.resize(nb, nw);
  angle_gen_.resize(nb, ng);
  for (int w = 0; w < nw; ++w) {
    const int pos = model_.bus_position(layout().wind_buses[static_cast<std::size_t>(w)]);
    wind_coef_.col(w) = model_.feeder_ptdf().col(pos);
    angle_wind_.col(w) = model_.angle_response().col(pos);
  }
  for (int g = 0; g < ng; ++g) {
    const int pos = model_.bus_position(layout().gen_buses[static_cast<std::size_t>(g)]);
    gen_coef_.col(g) = model_.feeder_ptdf().col(pos);
    angle_gen_.col(g) = model_.angle_response().col(pos);
  }

  const auto& loads = set_.load();
  const int nl = static_cast<int>(set_.load_buses().size());
  Eigen::MatrixXd ptdf_loads(nf, nl);
  Eigen::MatrixXd angle_loads(nb, nl);
  for (int l = 0; l < nl; ++l) {
    const int pos = model_.bus_position(set_.load_buses()[static_cast<std::size_t>(l)]);
    ptdf_loads.col(l) = model_.feeder_ptdf().col(pos);
    angle_loads.col(l) = model_.angle_response().col(pos);
  }
  load_flow_ = loads.matrix() * (-ptdf_loads).transpose();    // N x F
  angle_load_ = loads.matrix() * (-angle_loads).transpose();  // N x Nb
  load_total_ = loads.matrix().rowwise().sum();

  p_max_.resize(nf);
  scale_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    p_max_(f) = net_.feeders[static_cast<std::size_t>(f)].p_max;
    scale_(f) = p_max_(f) / kMarginScaleDivisor;
  }

  mean_load_total_ = parallel::pairwise_mean({load_total_.data(), static_cast<std::size_t>(n_)});
  mean_wind_.resize(nw);
  for (int w = 0; w < nw; ++w) {
    Eigen::VectorXd col = set_.wind().col(w);
    mean_wind_(w) = parallel::pairwise_mean({col.data(), static_cast<std::size_t>(n_)});
  }

  // rigorous reachability bound: if no decision in the box can push any angle
  // to its limit on this sample set, the per-sample angle hinges are
  // identically zero and the evaluation loop can skip them
  {
    const Eigen::VectorXd hi = upper_bounds();
    double worst = 0.0;
    for (int b = 0; b < nb; ++b) {
      double reach = angle_load_.col(b).cwiseAbs().maxCoeff();
      for (int w = 0; w < nw; ++w)
        reach += std::abs(angle_wind_(b, w)) * set_.wind().col(w).maxCoeff();
      for (int g = 0; g < ng; ++g) reach += std::abs(angle_gen_(b, g)) * hi(nw + g);
      worst = std::max(worst, reach);
    }
    angles_can_bind_ = worst >= std::min(-net_.angle_min, net_.angle_max);
  }

  scratch_ = std::make_unique<Scratch>();
}

void AssembledProblem::set_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  params_.tau = tau;
}

void AssembledProblem::set_inner_rhs_factor(double factor) {
  if (!(factor > 0.0 && factor <= 1.0))
    throw std::invalid_argument("inner rhs factor must lie in (0,1]");
  inner_rhs_factor_ = factor;
}

void AssembledProblem::set_alpha_override(double alpha) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0.5,1]");
  alpha_override_ = alpha;
}

void AssembledProblem::clear_alpha_override() { alpha_override_ = -1.0; }

double AssembledProblem::feeder_alpha(int feeder) const {
  if (alpha_override_ >= 0.0) return alpha_override_;
  return net_.feeders.at(static_cast<std::size_t>(feeder)).alpha;
}

Eigen::VectorXd AssembledProblem::lower_bounds() const { return layout().lower_bounds(net_); }
Eigen::VectorXd AssembledProblem::upper_bounds() const { return layout().upper_bounds(net_); }

Eigen::VectorXd AssembledProblem::default_start() const {
  const Eigen::VectorXd lo = lower_bounds();
  const Eigen::VectorXd hi = upper_bounds();
  Eigen::VectorXd u(dim_);
  const int nw = layout().wind_count();
  for (int k = 0; k < nw; ++k) u(k) = 1.0;
  for (int k = nw; k < dim_; ++k) u(k) = 0.5 * (lo(k) + hi(k));
  return u;
}

AssembledProblem::Evaluation AssembledProblem::evaluate(const Eigen::VectorXd& u) const {
  if (u.size() != dim_) throw std::invalid_argument("decision vector has wrong dimension");
  const int nf = constraint_count();
  const int nw = layout().wind_count();
  const int ng = layout().gen_count();
  const int nb = model_.bus_count();
  const Eigen::Index n = n_;

  Scratch& ws = *scratch_;
  if (ws.th.rows() != n) {
    ws.th.resize(n, nf);
    ws.dsig.resize(n, nf);
    ws.absflow.resize(n, nf);
    ws.wgrad.resize(n, nf * std::max(nw, 1));
    ws.pen.resize(n);
    ws.pengrad.resize(n, dim_);
  }

  const Eigen::VectorXd beta = u.head(nw);
  const Eigen::VectorXd pg = u.tail(ng);
  const double sum_pg = pg.sum();
  const Eigen::VectorXd gen_term = gen_coef_ * pg;          // F
  const Eigen::MatrixXd wc = wind_coef_ * beta.asDiagonal();  // F x W (coef * beta_w)
  const Eigen::VectorXd angle_gen_term = angle_gen_ * pg;   // Nb

  const double ps_min = net_.slack_source.p_min;
  const double ps_max = net_.slack_source.p_max;
  const double a_min = net_.angle_min;
  const double a_max = net_.angle_max;
  const smoothing::SmoothingParams prm = params_;
  const Variant variant = variant_;
  const bool angles_can_bind = angles_can_bind_;

#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
  for (Eigen::Index i = 0; i < n; ++i) {
    double wind_sum = 0.0;
    for (int w = 0; w < nw; ++w) wind_sum += beta(w) * set_.wind()(i, w);

    for (int f = 0; f < nf; ++f) {
      double flow = gen_term(f) + load_flow_(i, f);
      for (int w = 0; w < nw; ++w) flow += wc(f, w) * set_.wind()(i, w);
      const double af = std::abs(flow);
      const double sg = sign_of(flow);
      const double s = (af - p_max_(f)) / scale_(f);
      ws.absflow(i, f) = af;
      double dsig;
      if (variant == Variant::Deterministic) {
        ws.th(i, f) = s;
        dsig = sg / scale_(f);
      } else if (variant == Variant::Inner) {
        const ThetaPair tp = theta_pair(prm, s);
        ws.th(i, f) = tp.value;
        dsig = tp.ds * sg / scale_(f);
      } else {
        const ThetaPair tp = theta_pair(prm, -s);
        ws.th(i, f) = tp.value;
        dsig = -tp.ds * sg / scale_(f);
      }
      ws.dsig(i, f) = dsig;
      for (int w = 0; w < nw; ++w) ws.wgrad(i, f * nw + w) = dsig * set_.wind()(i, w);
    }

    // per-sample bound penalty: squared hinges on slack power and angles
    const double ps = load_total_(i) - wind_sum - sum_pg;
    double pen = 0.0;
    const double hi_s = ps > ps_max ? ps - ps_max : 0.0;
    const double lo_s = ps < ps_min ? ps_min - ps : 0.0;
    pen += hi_s * hi_s + lo_s * lo_s;
    const double dpen_dps = 2.0 * hi_s - 2.0 * lo_s;

    for (int k = 0; k < dim_; ++k) ws.pengrad(i, k) = 0.0;
    if (dpen_dps != 0.0) {
      for (int w = 0; w < nw; ++w) ws.pengrad(i, w) = dpen_dps * (-set_.wind()(i, w));
      for (int g = 0; g < ng; ++g) ws.pengrad(i, nw + g) = -dpen_dps;
    }
    for (int b = 0; angles_can_bind && b < nb; ++b) {
      double ang = angle_load_(i, b) + angle_gen_term(b);
      for (int w = 0; w < nw; ++w) ang += angle_wind_(b, w) * beta(w) * set_.wind()(i, w);
      const double hi_a = ang > a_max ? ang - a_max : 0.0;
      const double lo_a = ang < a_min ? a_min - ang : 0.0;
      if (hi_a == 0.0 && lo_a == 0.0) continue;
      pen += hi_a * hi_a + lo_a * lo_a;
      const double dpen_da = 2.0 * hi_a - 2.0 * lo_a;
      for (int w = 0; w < nw; ++w)
        ws.pengrad(i, w) += dpen_da * angle_wind_(b, w) * set_.wind()(i, w);
      for (int g = 0; g < ng; ++g) ws.pengrad(i, nw + g) += dpen_da * angle_gen_(b, g);
    }
    ws.pen(i) = pen;
  }

  Evaluation ev;
  ev.constraints.resize(nf);
  ev.constraint_grads.resize(nf, dim_);
  ev.min_abs_flow.resize(nf);

  for (int f = 0; f < nf; ++f) {
    const double agg = variant == Variant::Deterministic
                           ? ws.th(0, f)
                           : parallel::pairwise_mean(col_span(ws.th, f));
    Eigen::VectorXd cg(dim_);
    const double mean_dsig = parallel::pairwise_mean(col_span(ws.dsig, f));
    for (int w = 0; w < nw; ++w)
      cg(w) = wind_coef_(f, w) * parallel::pairwise_mean(col_span(ws.wgrad, f * nw + w));
    for (int g = 0; g < ng; ++g) cg(nw + g) = gen_coef_(f, g) * mean_dsig;

    const double alpha = feeder_alpha(f);
    switch (variant) {
      case Variant::Inner:
        ev.constraints(f) = agg - inner_rhs_factor_ * (1.0 - alpha);
        ev.constraint_grads.row(f) = cg;
        break;
      case Variant::Outer:
        ev.constraints(f) = alpha - agg;
        ev.constraint_grads.row(f) = -cg;
        break;
      case Variant::Deterministic:
        ev.constraints(f) = agg;
        ev.constraint_grads.row(f) = cg;
        break;
    }
    double mn = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) mn = std::min(mn, ws.absflow(i, f));
    ev.min_abs_flow(f) = mn;
  }

  ev.penalty_raw = parallel::pairwise_sum({ws.pen.data(), static_cast<std::size_t>(n)});
  ev.penalty_grad_raw.resize(dim_);
  for (int k = 0; k < dim_; ++k)
    ev.penalty_grad_raw(k) = parallel::pairwise_sum(col_span(ws.pengrad, k));

  // economic objective is exactly affine in u
  ev.objective_grad.resize(dim_);
  double obj = net_.slack_source.price * (mean_load_total_ - sum_pg);
  for (int w = 0; w < nw; ++w) {
    obj -= net_.slack_source.price * mean_wind_(w) * beta(w);
    ev.objective_grad(w) = -net_.slack_source.price * mean_wind_(w);
  }
  for (int g = 0; g < ng; ++g) {
    const int bus = layout().gen_buses[static_cast<std::size_t>(g)];
    double price = 0.0;
    for (const auto& gen : net_.generators)
      if (gen.bus == bus) price = gen.price;
    obj += price * pg(g);
    ev.objective_grad(nw + g) = price - net_.slack_source.price;
  }
  ev.objective = obj;

  ev.merit = ev.objective + penalty_weight_ * ev.penalty_raw;
  ev.merit_grad = ev.objective_grad + penalty_weight_ * ev.penalty_grad_raw;
  return ev;
}

void AssembledProblem::flows_for(const Eigen::VectorXd& u, int feeder, Eigen::ArrayXd& out) const {
  const int nw = layout().wind_count();
  const int ng = layout().gen_count();
  const Eigen::VectorXd beta = u.head(nw);
  const Eigen::VectorXd pg = u.tail(ng);
  const double gen_term = (gen_coef_.row(feeder) * pg).value();
  out.resize(n_);
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
  for (Eigen::Index i = 0; i < n_; ++i) {
    double flow = gen_term + load_flow_(i, feeder);
    for (int w = 0; w < nw; ++w) flow += wind_coef_(feeder, w) * beta(w) * set_.wind()(i, w);
    out(i) = flow;
  }
}

Eigen::ArrayXd AssembledProblem::slack_series(const Eigen::VectorXd& u) const {
  const int nw = layout().wind_count();
  const int ng = layout().gen_count();
  const Eigen::VectorXd beta = u.head(nw);
  const double sum_pg = u.tail(ng).sum();
  Eigen::ArrayXd ps(n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    double wind_sum = 0.0;
    for (int w = 0; w < nw; ++w) wind_sum += beta(w) * set_.wind()(i, w);
    ps(i) = load_total_(i) - wind_sum - sum_pg;
  }
  return ps;
}

std::vector<FeederProbe> AssembledProblem::probe(const Eigen::VectorXd& u) const {
  std::vector<FeederProbe> probes;
  const auto nn = static_cast<std::size_t>(n_);
  Eigen::ArrayXd flows;
  Eigen::VectorXd th_pos(n_), th_neg(n_), ind_pos(n_), ind_neg(n_);
  for (int f = 0; f < constraint_count(); ++f) {
    flows_for(u, f, flows);
    const auto& fe = net_.feeders[static_cast<std::size_t>(f)];
    FeederProbe pr;
    pr.from = fe.from_bus;
    pr.to = fe.to_bus;
    pr.alpha = feeder_alpha(f);
    double mn = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double af = std::abs(flows(i));
      mn = std::min(mn, af);
      const double s = (af - p_max_(f)) / scale_(f);
      th_pos(i) = smoothing::theta(params_, s);
      th_neg(i) = smoothing::theta(params_, -s);
      ind_pos(i) = smoothing::indicator(s);
      ind_neg(i) = smoothing::indicator(-s);
    }
    pr.min_abs_flow = mn;
    pr.psi = parallel::pairwise_mean({th_pos.data(), nn});
    pr.phi = parallel::pairwise_mean({th_neg.data(), nn});
    pr.violation_rate = parallel::pairwise_mean({ind_pos.data(), nn});
    pr.satisfaction_rate = parallel::pairwise_mean({ind_neg.data(), nn});
    probes.push_back(pr);
  }
  return probes;
}

ValueGrad AssembledProblem::objective(const Eigen::VectorXd& u) const {
  Evaluation ev = evaluate(u);
  return {ev.objective, ev.objective_grad};
}

namespace {
ValueGrad smoothed_average(const AssembledProblem& ap, const Eigen::ArrayXd& flows,
                           const smoothing::SmoothingParams& prm, double p_max, double scale,
                           const Eigen::MatrixXd& wind_coef, const Eigen::MatrixXd& gen_coef,
                           int feeder, int nw, int ng, const Eigen::ArrayXXd& wind, bool negate) {
  const Eigen::Index n = flows.size();
  Eigen::VectorXd th(n), dsig(n);
  Eigen::MatrixXd wg(n, std::max(nw, 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double af = std::abs(flows(i));
    const double sg = sign_of(flows(i));
    const double s = (af - p_max) / scale;
    th(i) = smoothing::theta(prm, negate ? -s : s);
    const double slope = smoothing::theta_ds(prm, negate ? -s : s);
    dsig(i) = (negate ? -slope : slope) * sg / scale;
    for (int w = 0; w < nw; ++w) wg(i, w) = dsig(i) * wind(i, w);
  }
  ValueGrad out;
  const auto nn = static_cast<std::size_t>(n);
  out.value = parallel::pairwise_mean({th.data(), nn});
  out.grad.resize(nw + ng);
  for (int w = 0; w < nw; ++w)
    out.grad(w) = wind_coef(feeder, w) * parallel::pairwise_mean({wg.col(w).data(), nn});
  const double mean_dsig = parallel::pairwise_mean({dsig.data(), nn});
  for (int g = 0; g < ng; ++g) out.grad(nw + g) = gen_coef(feeder, g) * mean_dsig;
  (void)ap;
  return out;
}
}  // namespace

ValueGrad AssembledProblem::psi(const Eigen::VectorXd& u, int feeder) const {
  Eigen::ArrayXd flows;
  flows_for(u, feeder, flows);
  return smoothed_average(*this, flows, params_, p_max_(feeder), scale_(feeder), wind_coef_,
                          gen_coef_, feeder, layout().wind_count(), layout().gen_count(),
                          set_.wind(), false);
}

ValueGrad AssembledProblem::phi(const Eigen::VectorXd& u, int feeder) const {
  Eigen::ArrayXd flows;
  flows_for(u, feeder, flows);
  return smoothed_average(*this, flows, params_, p_max_(feeder), scale_(feeder), wind_coef_,
                          gen_coef_, feeder, layout().wind_count(), layout().gen_count(),
                          set_.wind(), true);
}

ValueGrad AssembledProblem::bound_penalty(const Eigen::VectorXd& u) const {
  Evaluation ev = evaluate(u);
  return {ev.penalty_raw, ev.penalty_grad_raw};
}

BoundAudit AssembledProblem::bound_audit(const Eigen::VectorXd& u) const {
  BoundAudit audit;
  const Eigen::ArrayXd ps = slack_series(u);
  for (Eigen::Index i = 0; i < n_; ++i) {
    const double hi = ps(i) - net_.slack_source.p_max;
    const double lo = net_.slack_source.p_min - ps(i);
    const double excess = std::max(hi, lo);
    if (excess > 0.0) {
      ++audit.slack_violations;
      audit.worst_slack_excess = std::max(audit.worst_slack_excess, excess);
    }
  }
  const int nb = model_.bus_count();
  const int nw = layout().wind_count();
  const int ng = layout().gen_count();
  const Eigen::VectorXd beta = u.head(nw);
  const Eigen::VectorXd pg = u.tail(ng);
  const Eigen::VectorXd angle_gen_term = angle_gen_ * pg;
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (int b = 0; b < nb; ++b) {
      double ang = angle_load_(i, b) + angle_gen_term(b);
      for (int w = 0; w < nw; ++w) ang += angle_wind_(b, w) * beta(w) * set_.wind()(i, w);
      const double excess = std::max(ang - net_.angle_max, net_.angle_min - ang);
      if (excess > 0.0) {
        ++audit.angle_violations;
        audit.worst_angle_excess = std::max(audit.worst_angle_excess, excess);
      }
    }
  }
  return audit;
}

ValueGrad objective(const model::Network& net, const dcflow::Decision& u,
                    const scenario::ScenarioSet& set) {
  AssembledProblem ap(net, set, Variant::Inner, smoothing::SmoothingParams{});
  return ap.objective(ap.layout().pack(u));
}

FeederMargin feeder_margin(const model::Network& net, const dcflow::Decision& u,
                           const scenario::Scenario& s, int feeder) {
  dcflow::FlowModel fm(net);
  const auto& fe = net.feeders.at(static_cast<std::size_t>(feeder));
  const dcflow::SampleState st = fm.solve(u, s);
  const double flow = st.flows.at({fe.from_bus, fe.to_bus});
  FeederMargin m;
  m.h = std::abs(flow) - fe.p_max;
  const double sg = sign_of(flow);
  const auto& layout = fm.layout();
  m.grad.resize(layout.dim());
  int k = 0;
  for (int bus : layout.wind_buses)
    m.grad(k++) = sg * fm.feeder_ptdf()(feeder, fm.bus_position(bus)) * s.wind.at(bus);
  for (int bus : layout.gen_buses)
    m.grad(k++) = sg * fm.feeder_ptdf()(feeder, fm.bus_position(bus));
  return m;
}

ValueGrad psi_inner(const model::Network& net, const dcflow::Decision& u,
                    const scenario::ScenarioSet& set, int feeder,
                    const smoothing::SmoothingParams& p) {
  if (!p.is_majorant())
    throw std::invalid_argument("inner approximation requires m1 >= m2");
  AssembledProblem ap(net, set, Variant::Inner, p);
  return ap.psi(ap.layout().pack(u), feeder);
}

ValueGrad phi_outer(const model::Network& net, const dcflow::Decision& u,
                    const scenario::ScenarioSet& set, int feeder,
                    const smoothing::SmoothingParams& p) {
  if (!p.is_majorant())
    throw std::invalid_argument("outer approximation requires m1 >= m2");
  AssembledProblem ap(net, set, Variant::Outer, p);
  return ap.phi(ap.layout().pack(u), feeder);
}

ValueGrad bound_penalty(const model::Network& net, const dcflow::Decision& u,
                        const scenario::ScenarioSet& set) {
  AssembledProblem ap(net, set, Variant::Inner, smoothing::SmoothingParams{});
  return ap.bound_penalty(ap.layout().pack(u));
}

AssembledProblem assemble(const model::Network& net, const scenario::ScenarioSet& set,
                          Variant variant, smoothing::SmoothingParams params,
                          double penalty_weight) {
  return AssembledProblem(net, set, variant, params, penalty_weight);
}

}  // namespace ccopf::saa
