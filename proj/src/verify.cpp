#include "ccopf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ccopf/format.hpp"
#include "ccopf/parallel.hpp"

namespace ccopf::verify {

std::string to_string(Method m) { return m == Method::Qmc ? "qmc" : "mc"; }

Method method_from_string(const std::string& s) {
  if (s == "qmc") return Method::Qmc;
  if (s == "mc") return Method::Mc;
  throw std::invalid_argument("unknown verification method '" + s + "'");
}

namespace {
// Batched feeder flows for a fixed decision over a scenario set.
Eigen::ArrayXXd batched_flows(const dcflow::FlowModel& fm, const Eigen::VectorXd& u,
                              const scenario::ScenarioSet& set) {
  const auto& layout = fm.layout();
  const int nw = layout.wind_count();
  const int ng = layout.gen_count();
  const int nf = fm.feeder_count();
  const Eigen::VectorXd beta = u.head(nw);
  const Eigen::VectorXd pg = u.tail(ng);

  Eigen::VectorXd gen_term = Eigen::VectorXd::Zero(nf);
  for (int g = 0; g < ng; ++g)
    gen_term += fm.feeder_ptdf().col(fm.bus_position(layout.gen_buses[static_cast<std::size_t>(g)])) * pg(g);

  const int nl = static_cast<int>(set.load_buses().size());
  Eigen::MatrixXd ptdf_loads(nf, nl);
  for (int l = 0; l < nl; ++l)
    ptdf_loads.col(l) =
        fm.feeder_ptdf().col(fm.bus_position(set.load_buses()[static_cast<std::size_t>(l)]));
  const Eigen::MatrixXd load_flow = set.load().matrix() * (-ptdf_loads).transpose();  // N x F

  Eigen::MatrixXd wind_coef(nf, std::max(nw, 1));
  for (int w = 0; w < nw; ++w)
    wind_coef.col(w) =
        fm.feeder_ptdf().col(fm.bus_position(layout.wind_buses[static_cast<std::size_t>(w)]));

  const auto n = static_cast<Eigen::Index>(set.count());
  Eigen::ArrayXXd flows(n, nf);
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
  for (Eigen::Index i = 0; i < n; ++i)
    for (int f = 0; f < nf; ++f) {
      double v = gen_term(f) + load_flow(i, f);
      for (int w = 0; w < nw; ++w) v += wind_coef(f, w) * beta(w) * set.wind()(i, w);
      flows(i, f) = v;
    }
  return flows;
}
}  // namespace

ProbabilityTable true_probability(const model::Network& net, const dcflow::Decision& u,
                                  std::size_t points, Method method, std::uint64_t seed,
                                  std::uint64_t qmc_offset) {
  if (points < (1u << 10)) throw std::invalid_argument("verification needs at least 2^10 points");
  const scenario::ScenarioSet fresh =
      method == Method::Qmc
          ? scenario::generate_scenarios(net, points, 0, scenario::Source::QuasiMonteCarlo,
                                         qmc_offset)
          : scenario::generate_scenarios(net, points, seed, scenario::Source::MonteCarlo);

  dcflow::FlowModel fm(net);
  const Eigen::VectorXd uv = fm.layout().pack(u);
  const Eigen::ArrayXXd flows = batched_flows(fm, uv, fresh);

  ProbabilityTable table;
  table.points = points;
  table.method = method;
  table.seed = method == Method::Mc ? seed : 0;
  table.qmc_offset = method == Method::Qmc ? qmc_offset : 0;
  for (int f = 0; f < fm.feeder_count(); ++f) {
    const auto& fe = net.feeders[static_cast<std::size_t>(f)];
    std::int64_t satisfied = 0;  // exact integer count, order independent
#pragma omp parallel for schedule(static) reduction(+ : satisfied) \
    num_threads(parallel::thread_count())
    for (Eigen::Index i = 0; i < flows.rows(); ++i)
      if (std::abs(flows(i, f)) <= fe.p_max) ++satisfied;
    table.entries.push_back(
        {fe.from_bus, fe.to_bus, static_cast<double>(satisfied) / static_cast<double>(points)});
  }
  return table;
}

TrajectoryBundle trajectories(const model::Network& net, const dcflow::Decision& u,
                              const scenario::ScenarioSet& set) {
  scenario::validate_schema(net, set);
  dcflow::FlowModel fm(net);
  const Eigen::VectorXd uv = fm.layout().pack(u);
  TrajectoryBundle tb;
  tb.decision = u;
  for (const auto& fe : net.feeders) tb.feeder_keys.emplace_back(fe.from_bus, fe.to_bus);
  tb.flows = batched_flows(fm, uv, set);

  const auto n = static_cast<Eigen::Index>(set.count());
  const int nw = fm.layout().wind_count();
  const Eigen::VectorXd beta = uv.head(nw);
  const double sum_pg = uv.tail(fm.layout().gen_count()).sum();
  double gen_cost = 0.0;
  for (const auto& g : net.generators) gen_cost += g.price * u.p_g.at(g.bus);

  tb.slack.resize(n);
  tb.cost.resize(n);
  const Eigen::VectorXd load_total = set.load().matrix().rowwise().sum();
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
  for (Eigen::Index i = 0; i < n; ++i) {
    double wind_sum = 0.0;
    for (int w = 0; w < nw; ++w) wind_sum += beta(w) * set.wind()(i, w);
    tb.slack(i) = load_total(i) - wind_sum - sum_pg;
    tb.cost(i) = gen_cost + net.slack_source.price * tb.slack(i);
  }
  return tb;
}

Comparison compare(const model::Network& net, const scenario::ScenarioSet& set,
                   const nlp::SolveReport& stochastic, const nlp::SolveReport& deterministic) {
  if (!stochastic.network_digest.empty() && !deterministic.network_digest.empty() &&
      stochastic.network_digest != deterministic.network_digest)
    throw std::invalid_argument("solve reports reference different networks");
  scenario::validate_schema(net, set);

  dcflow::FlowModel fm(net);
  const Eigen::ArrayXXd flows_s = batched_flows(fm, fm.layout().pack(stochastic.u_star), set);
  const Eigen::ArrayXXd flows_d = batched_flows(fm, fm.layout().pack(deterministic.u_star), set);

  Comparison cmp;
  cmp.sample_count = set.count();
  cmp.stochastic_objective = stochastic.objective;
  cmp.deterministic_objective = deterministic.objective;
  const auto n = static_cast<double>(set.count());
  for (int f = 0; f < fm.feeder_count(); ++f) {
    const auto& fe = net.feeders[static_cast<std::size_t>(f)];
    FeederComparison fc;
    fc.from = fe.from_bus;
    fc.to = fe.to_bus;
    fc.alpha = fe.alpha;
    for (Eigen::Index i = 0; i < flows_s.rows(); ++i) {
      if (std::abs(flows_s(i, f)) > fe.p_max) ++fc.stochastic_violations;
      if (std::abs(flows_d(i, f)) > fe.p_max) ++fc.deterministic_violations;
    }
    fc.stochastic_rate = static_cast<double>(fc.stochastic_violations) / n;
    fc.deterministic_rate = static_cast<double>(fc.deterministic_violations) / n;
    fc.flagged =
        fc.deterministic_rate > 1.0 - fe.alpha && fc.stochastic_rate <= 1.0 - fe.alpha;
    if (fc.flagged) ++cmp.flagged_count;
    cmp.feeders.push_back(fc);
  }
  return cmp;
}

std::string probability_matrix_csv(const ProbabilityTable& table, const model::Network& net) {
  std::vector<int> ids;
  for (const auto& b : net.buses) ids.push_back(b.id);
  std::sort(ids.begin(), ids.end());

  std::map<std::pair<int, int>, double> probs;
  for (const auto& e : table.entries) {
    probs[{e.from, e.to}] = e.probability;
    probs[{e.to, e.from}] = e.probability;
  }

  std::string out = "bus";
  for (int id : ids) out += "," + std::to_string(id);
  out += "\n";
  for (int r : ids) {
    out += std::to_string(r);
    for (int c : ids) {
      auto it = probs.find({r, c});
      out += ",";
      out += it == probs.end() ? "N/A" : format::shortest(it->second);
    }
    out += "\n";
  }
  return out;
}

std::string trajectory_csv(const TrajectoryBundle& bundle) {
  std::string out = "sample";
  for (const auto& [from, to] : bundle.feeder_keys)
    out += ",flow_" + std::to_string(from) + "_" + std::to_string(to);
  out += ",slack_mw,cost_per_h\n";
  for (Eigen::Index i = 0; i < bundle.flows.rows(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index f = 0; f < bundle.flows.cols(); ++f) {
      out += ',';
      out += format::shortest(bundle.flows(i, f));
    }
    out += ',';
    out += format::shortest(bundle.slack(i));
    out += ',';
    out += format::shortest(bundle.cost(i));
    out += '\n';
  }
  return out;
}

}  // namespace ccopf::verify
