#include "ccopf/dcflow.hpp"

#include <algorithm>
#include <cmath>

namespace ccopf::dcflow {

DecisionLayout DecisionLayout::from_network(const model::Network& net) {
  DecisionLayout l;
  l.wind_buses = net.wind_buses();
  l.gen_buses = net.gen_buses();
  return l;
}

Eigen::VectorXd DecisionLayout::pack(const Decision& u) const {
  Eigen::VectorXd v(dim());
  int k = 0;
  for (int bus : wind_buses) {
    auto it = u.beta_w.find(bus);
    if (it == u.beta_w.end())
      throw std::invalid_argument("decision missing beta_w for bus " + std::to_string(bus));
    v(k++) = it->second;
  }
  for (int bus : gen_buses) {
    auto it = u.p_g.find(bus);
    if (it == u.p_g.end())
      throw std::invalid_argument("decision missing p_g for bus " + std::to_string(bus));
    v(k++) = it->second;
  }
  return v;
}

Decision DecisionLayout::unpack(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw std::invalid_argument("decision vector has wrong dimension");
  Decision d;
  int k = 0;
  for (int bus : wind_buses) d.beta_w[bus] = u(k++);
  for (int bus : gen_buses) d.p_g[bus] = u(k++);
  return d;
}

Eigen::VectorXd DecisionLayout::lower_bounds(const model::Network& net) const {
  Eigen::VectorXd lo(dim());
  int k = 0;
  for (std::size_t i = 0; i < wind_buses.size(); ++i) lo(k++) = 0.0;
  for (int bus : gen_buses) {
    for (const auto& g : net.generators)
      if (g.bus == bus) lo(k) = g.p_min;
    ++k;
  }
  return lo;
}

Eigen::VectorXd DecisionLayout::upper_bounds(const model::Network& net) const {
  Eigen::VectorXd hi(dim());
  int k = 0;
  for (std::size_t i = 0; i < wind_buses.size(); ++i) hi(k++) = 1.0;
  for (int bus : gen_buses) {
    for (const auto& g : net.generators)
      if (g.bus == bus) hi(k) = g.p_max;
    ++k;
  }
  return hi;
}

FlowModel::FlowModel(const model::Network& net) : net_(net) {
  layout_ = DecisionLayout::from_network(net_);
  for (const auto& b : net_.buses) bus_ids_.push_back(b.id);
  std::sort(bus_ids_.begin(), bus_ids_.end());
  slack_pos_ = bus_position(net_.slack_bus());

  const int nb = bus_count();
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(nb, nb);
  for (const auto& f : net_.feeders) {
    const int i = bus_position(f.from_bus);
    const int j = bus_position(f.to_bus);
    laplacian(i, i) += f.susceptance;
    laplacian(j, j) += f.susceptance;
    laplacian(i, j) -= f.susceptance;
    laplacian(j, i) -= f.susceptance;
  }

  // reduced system: slack row/column removed, factored once
  std::vector<int> red;
  for (int i = 0; i < nb; ++i)
    if (i != slack_pos_) red.push_back(i);
  const int nr = static_cast<int>(red.size());
  Eigen::MatrixXd reduced(nr, nr);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nr; ++c) reduced(r, c) = laplacian(red[r], red[c]);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(reduced);
  if (nr > 0 && !lu.isInvertible())
    throw StructuralError("singular reduced susceptance system (is the feeder graph connected?)");
  const Eigen::MatrixXd inv = nr > 0 ? lu.inverse() : Eigen::MatrixXd();

  angle_response_ = Eigen::MatrixXd::Zero(nb, nb);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nr; ++c) angle_response_(red[r], red[c]) = inv(r, c);

  feeder_ptdf_.resize(feeder_count(), nb);
  for (int f = 0; f < feeder_count(); ++f) {
    const auto& fe = net_.feeders[static_cast<std::size_t>(f)];
    const int i = bus_position(fe.from_bus);
    const int j = bus_position(fe.to_bus);
    feeder_ptdf_.row(f) =
        fe.susceptance * (angle_response_.row(i) - angle_response_.row(j));
  }
}

int FlowModel::bus_position(int bus_id) const {
  auto it = std::lower_bound(bus_ids_.begin(), bus_ids_.end(), bus_id);
  if (it == bus_ids_.end() || *it != bus_id)
    throw std::invalid_argument("unknown bus id " + std::to_string(bus_id));
  return static_cast<int>(it - bus_ids_.begin());
}

Eigen::VectorXd FlowModel::injections(const Decision& u, const scenario::Scenario& s) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(bus_count());
  for (const auto& w : net_.wind_farms) {
    const double beta = u.beta_w.at(w.bus);
    if (beta < -1e-9 || beta > 1.0 + 1e-9)
      throw std::invalid_argument("curtailment factor outside [0,1]");
    p(bus_position(w.bus)) += beta * s.wind.at(w.bus);
  }
  for (const auto& g : net_.generators) {
    const double pg = u.p_g.at(g.bus);
    if (pg < g.p_min - 1e-9 || pg > g.p_max + 1e-9)
      throw std::invalid_argument("generator dispatch outside its box");
    p(bus_position(g.bus)) += pg;
  }
  for (const auto& l : net_.loads) p(bus_position(l.bus)) -= s.load.at(l.bus);
  return p;
}

SampleState FlowModel::solve(const Decision& u, const scenario::Scenario& s) const {
  const Eigen::VectorXd p = injections(u, s);
  // slack absorbs the residual: total injection sums to zero
  const double slack_power = -p.sum();
  const Eigen::VectorXd delta = angle_response_ * p;  // slack row gives exactly 0

  SampleState st;
  st.slack_power = slack_power;
  for (int i = 0; i < bus_count(); ++i) st.angles[bus_ids_[static_cast<std::size_t>(i)]] = delta(i);
  for (int f = 0; f < feeder_count(); ++f) {
    const auto& fe = net_.feeders[static_cast<std::size_t>(f)];
    const double flow =
        fe.susceptance * (delta(bus_position(fe.from_bus)) - delta(bus_position(fe.to_bus)));
    st.flows[{fe.from_bus, fe.to_bus}] = flow;
  }
  return st;
}

AffineSensitivity FlowModel::sensitivities(const scenario::Scenario& s) const {
  AffineSensitivity a;
  a.layout = layout_;
  const int dim = layout_.dim();
  const int nf = feeder_count();

  Eigen::VectorXd p_load = Eigen::VectorXd::Zero(bus_count());
  for (const auto& l : net_.loads) p_load(bus_position(l.bus)) -= s.load.at(l.bus);

  a.feeder_const = feeder_ptdf_ * p_load;
  a.feeder_grad = Eigen::MatrixXd::Zero(nf, dim);
  a.slack_const = -p_load.sum();
  a.slack_grad = Eigen::VectorXd::Zero(dim);

  int k = 0;
  for (int bus : layout_.wind_buses) {
    const double pw = s.wind.at(bus);
    a.feeder_grad.col(k) = feeder_ptdf_.col(bus_position(bus)) * pw;
    a.slack_grad(k) = -pw;
    ++k;
  }
  for (int bus : layout_.gen_buses) {
    a.feeder_grad.col(k) = feeder_ptdf_.col(bus_position(bus));
    a.slack_grad(k) = -1.0;
    ++k;
  }
  for (const auto& fe : net_.feeders) a.feeder_keys.emplace_back(fe.from_bus, fe.to_bus);
  return a;
}

SampleState solve_flow(const model::Network& net, const Decision& u, const scenario::Scenario& s) {
  return FlowModel(net).solve(u, s);
}

AffineSensitivity sensitivities(const model::Network& net, const scenario::Scenario& s) {
  return FlowModel(net).sensitivities(s);
}

}  // namespace ccopf::dcflow
