#include "ccopf/reference.hpp"

#include <algorithm>
#include <cmath>

#include "ccopf/saa.hpp"

namespace ccopf::reference {

dcflow::SampleState solve_flow_dense(const model::Network& net, const dcflow::Decision& u,
                                     const scenario::Scenario& s) {
  std::vector<int> ids;
  for (const auto& b : net.buses) ids.push_back(b.id);
  std::sort(ids.begin(), ids.end());
  const auto pos = [&](int id) {
    return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  const int nb = static_cast<int>(ids.size());
  const int slack = pos(net.slack_bus());

  // full-size system with the slack row replaced by delta_slack = 0
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
  for (const auto& f : net.feeders) {
    const int i = pos(f.from_bus);
    const int j = pos(f.to_bus);
    sys(i, i) += f.susceptance;
    sys(j, j) += f.susceptance;
    sys(i, j) -= f.susceptance;
    sys(j, i) -= f.susceptance;
  }
  for (const auto& w : net.wind_farms) rhs(pos(w.bus)) += u.beta_w.at(w.bus) * s.wind.at(w.bus);
  for (const auto& g : net.generators) rhs(pos(g.bus)) += u.p_g.at(g.bus);
  for (const auto& l : net.loads) rhs(pos(l.bus)) -= s.load.at(l.bus);

  Eigen::RowVectorXd laplacian_slack_row = sys.row(slack);
  double slack_injection_rest = rhs(slack);
  sys.row(slack).setZero();
  sys(slack, slack) = 1.0;
  rhs(slack) = 0.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys);
  if (qr.rank() < nb) throw dcflow::StructuralError("singular pinned system (disconnected graph?)");
  const Eigen::VectorXd delta = qr.solve(rhs);

  dcflow::SampleState st;
  for (int i = 0; i < nb; ++i) st.angles[ids[static_cast<std::size_t>(i)]] = delta(i);
  for (const auto& f : net.feeders)
    st.flows[{f.from_bus, f.to_bus}] =
        f.susceptance * (delta(pos(f.from_bus)) - delta(pos(f.to_bus)));
  // slack power closes the slack bus nodal balance
  st.slack_power = laplacian_slack_row.dot(delta) - slack_injection_rest;
  return st;
}

namespace {
double flow_at(const model::Network& net, const dcflow::Decision& u,
               const scenario::ScenarioSet& set, std::size_t i, int feeder) {
  const auto& fe = net.feeders.at(static_cast<std::size_t>(feeder));
  const auto st = solve_flow_dense(net, u, set.scenario(i));
  return st.flows.at({fe.from_bus, fe.to_bus});
}
}  // namespace

double psi_value(const model::Network& net, const dcflow::Decision& u,
                 const scenario::ScenarioSet& set, int feeder,
                 const smoothing::SmoothingParams& p) {
  const auto& fe = net.feeders.at(static_cast<std::size_t>(feeder));
  const double scale = fe.p_max / saa::kMarginScaleDivisor;
  double acc = 0.0;
  for (std::size_t i = 0; i < set.count(); ++i) {
    const double s = (std::abs(flow_at(net, u, set, i, feeder)) - fe.p_max) / scale;
    acc += smoothing::theta(p, s);
  }
  return acc / static_cast<double>(set.count());
}

double phi_value(const model::Network& net, const dcflow::Decision& u,
                 const scenario::ScenarioSet& set, int feeder,
                 const smoothing::SmoothingParams& p) {
  const auto& fe = net.feeders.at(static_cast<std::size_t>(feeder));
  const double scale = fe.p_max / saa::kMarginScaleDivisor;
  double acc = 0.0;
  for (std::size_t i = 0; i < set.count(); ++i) {
    const double s = (std::abs(flow_at(net, u, set, i, feeder)) - fe.p_max) / scale;
    acc += smoothing::theta(p, -s);
  }
  return acc / static_cast<double>(set.count());
}

double violation_rate(const model::Network& net, const dcflow::Decision& u,
                      const scenario::ScenarioSet& set, int feeder) {
  const auto& fe = net.feeders.at(static_cast<std::size_t>(feeder));
  std::size_t count = 0;
  for (std::size_t i = 0; i < set.count(); ++i)
    if (std::abs(flow_at(net, u, set, i, feeder)) - fe.p_max >= 0.0) ++count;
  return static_cast<double>(count) / static_cast<double>(set.count());
}

double objective_value(const model::Network& net, const dcflow::Decision& u,
                       const scenario::ScenarioSet& set) {
  double gen_cost = 0.0;
  for (const auto& g : net.generators) gen_cost += g.price * u.p_g.at(g.bus);
  double slack_mean = 0.0;
  for (std::size_t i = 0; i < set.count(); ++i)
    slack_mean += solve_flow_dense(net, u, set.scenario(i)).slack_power;
  slack_mean /= static_cast<double>(set.count());
  return gen_cost + net.slack_source.price * slack_mean;
}

double bound_penalty_value(const model::Network& net, const dcflow::Decision& u,
                           const scenario::ScenarioSet& set) {
  double acc = 0.0;
  const auto hinge2 = [](double x) { return x > 0.0 ? x * x : 0.0; };
  for (std::size_t i = 0; i < set.count(); ++i) {
    const auto st = solve_flow_dense(net, u, set.scenario(i));
    acc += hinge2(st.slack_power - net.slack_source.p_max);
    acc += hinge2(net.slack_source.p_min - st.slack_power);
    for (const auto& [bus, ang] : st.angles) {
      acc += hinge2(ang - net.angle_max);
      acc += hinge2(net.angle_min - ang);
    }
  }
  return acc;
}

double satisfaction_probability(const model::Network& net, const dcflow::Decision& u,
                                const scenario::ScenarioSet& set, int feeder) {
  const auto& fe = net.feeders.at(static_cast<std::size_t>(feeder));
  std::size_t count = 0;
  for (std::size_t i = 0; i < set.count(); ++i)
    if (std::abs(flow_at(net, u, set, i, feeder)) <= fe.p_max) ++count;
  return static_cast<double>(count) / static_cast<double>(set.count());
}

}  // namespace ccopf::reference
