#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccopf/dcflow.hpp"
#include "ccopf/reference.hpp"

using namespace ccopf;

namespace {

model::Network two_bus() {
  model::Network net;
  net.buses = {{1, true}, {2, false}};
  net.feeders = {{1, 2, 1000.0, 500.0, 0.98}};
  net.slack_source = {1, 15.0, -1000.0, 1000.0};
  model::Load l;
  l.bus = 2;
  l.mean = 100.0;
  l.dist = {model::DistKind::PointMass, 0, 0, 0, 0, 100.0, 0.0, 200.0};
  net.loads = {l};
  return net;
}

model::Network triangle(bool with_gen3 = false) {
  model::Network net;
  net.buses = {{1, true}, {2, false}, {3, false}};
  net.feeders = {{1, 2, 1000.0, 500.0, 0.98},
                 {1, 3, 1000.0, 500.0, 0.98},
                 {2, 3, 1000.0, 500.0, 0.98}};
  net.slack_source = {1, 15.0, -1000.0, 1000.0};
  model::Load l;
  l.bus = 3;
  l.mean = 90.0;
  l.dist = {model::DistKind::PointMass, 0, 0, 0, 0, 90.0, 0.0, 200.0};
  net.loads = {l};
  if (with_gen3) net.generators = {{3, 10.0, 0.0, 300.0}};
  return net;
}

// random connected 5-bus instance with wind and two generators
model::Network random_five_bus(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> b(500.0, 5000.0), pm(100.0, 600.0);
  model::Network net;
  net.buses = {{1, true}, {2, false}, {3, false}, {4, false}, {5, false}};
  const std::pair<int, int> edges[] = {{1, 2}, {1, 4}, {1, 5}, {2, 3}, {3, 4}, {4, 5}};
  for (auto [i, j] : edges) net.feeders.push_back({i, j, b(gen), pm(gen), 0.98});
  net.generators = {{4, 10.0, 0.0, 400.0}, {5, 10.0, 0.0, 500.0}};
  net.slack_source = {1, 15.0, -2000.0, 2000.0};
  model::WindFarm w;
  w.bus = 3;
  w.p_max = 600.0;
  w.forecast = 300.0;
  w.dist = {model::DistKind::PointMass, 0, 0, 0, 0, 300.0, 0.0, 600.0};
  net.wind_farms = {w};
  for (int bus : {2, 3, 4}) {
    model::Load l;
    l.bus = bus;
    l.mean = 300.0;
    l.dist = {model::DistKind::PointMass, 0, 0, 0, 0, 300.0, 0.0, 600.0};
    net.loads.push_back(l);
  }
  return net;
}

scenario::Scenario scenario_for(const model::Network& net, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> wind(0.0, 600.0), load(100.0, 500.0);
  scenario::Scenario s;
  for (const auto& w : net.wind_farms) s.wind[w.bus] = wind(gen);
  for (const auto& l : net.loads) s.load[l.bus] = load(gen);
  return s;
}

dcflow::Decision decision_for(const model::Network& net, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  dcflow::Decision u;
  for (const auto& w : net.wind_farms) u.beta_w[w.bus] = unit(gen);
  for (const auto& g : net.generators) u.p_g[g.bus] = g.p_min + unit(gen) * (g.p_max - g.p_min);
  return u;
}

double balance_residual(const model::Network& net, const dcflow::Decision& u,
                        const scenario::Scenario& s, const dcflow::SampleState& st) {
  double worst = 0.0;
  for (const auto& b : net.buses) {
    double injection = 0.0;
    for (const auto& w : net.wind_farms)
      if (w.bus == b.id) injection += u.beta_w.at(w.bus) * s.wind.at(w.bus);
    for (const auto& g : net.generators)
      if (g.bus == b.id) injection += u.p_g.at(g.bus);
    for (const auto& l : net.loads)
      if (l.bus == b.id) injection -= s.load.at(l.bus);
    if (b.is_slack) injection += st.slack_power;
    double outflow = 0.0;
    for (const auto& f : net.feeders) {
      const double flow = st.flows.at({f.from_bus, f.to_bus});
      if (f.from_bus == b.id) outflow += flow;
      if (f.to_bus == b.id) outflow -= flow;
    }
    worst = std::max(worst, std::abs(injection - outflow));
  }
  return worst;
}

}  // namespace

TEST_CASE("2-bus single line balance") {
  const auto net = two_bus();
  dcflow::Decision u;
  scenario::Scenario s;
  s.load[2] = 100.0;
  const auto st = dcflow::solve_flow(net, u, s);
  CHECK(st.angles.at(1) == 0.0);
  CHECK(st.angles.at(2) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(st.flows.at({1, 2}) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(st.slack_power == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(balance_residual(net, u, s, st) <= 1e-8);
}

TEST_CASE("3-bus triangle hand solution") {
  const auto net = triangle();
  dcflow::Decision u;
  scenario::Scenario s;
  s.load[3] = 90.0;
  const auto st = dcflow::solve_flow(net, u, s);
  // oracle: reduced 2x2 system [2000 -1000; -1000 2000] [d2 d3] = [0, -90]
  CHECK(st.angles.at(2) == doctest::Approx(-0.03).epsilon(1e-12));
  CHECK(st.angles.at(3) == doctest::Approx(-0.06).epsilon(1e-12));
  CHECK(st.flows.at({1, 2}) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(st.flows.at({1, 3}) == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(st.flows.at({2, 3}) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(st.slack_power == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("zero injection gives the zero state") {
  auto net = triangle();
  net.loads[0].mean = 0.0;
  dcflow::Decision u;
  scenario::Scenario s;
  s.load[3] = 0.0;
  const auto st = dcflow::solve_flow(net, u, s);
  for (const auto& [bus, ang] : st.angles) CHECK(ang == 0.0);
  for (const auto& [key, flow] : st.flows) CHECK(flow == 0.0);
  CHECK(st.slack_power == 0.0);
}

TEST_CASE("disconnected network raises a structural error") {
  model::Network net;
  net.buses = {{1, true}, {2, false}, {3, false}};
  net.feeders = {{1, 2, 1000.0, 100.0, 0.98}};  // bus 3 isolated
  net.slack_source = {1, 1.0, -100.0, 100.0};
  CHECK_THROWS_AS(dcflow::FlowModel{net}, dcflow::StructuralError);
}

TEST_CASE("2-bus sensitivities: constant 100, zero gradient") {
  const auto net = two_bus();
  scenario::Scenario s;
  s.load[2] = 100.0;
  const auto sens = dcflow::sensitivities(net, s);
  CHECK(sens.layout.dim() == 0);
  CHECK(sens.feeder_const(0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(sens.slack_const == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("slack absorbs generation one for one") {
  const auto net = triangle(true);
  scenario::Scenario s;
  s.load[3] = 90.0;
  const auto sens = dcflow::sensitivities(net, s);
  REQUIRE(sens.layout.gen_buses == std::vector<int>{3});
  CHECK(sens.slack_grad(0) == -1.0);
}

TEST_CASE("affine sensitivities reproduce the direct solve on random instances") {
  std::mt19937_64 gen(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = random_five_bus(gen);
    const auto s = scenario_for(net, gen);
    const auto u = decision_for(net, gen);
    const auto sens = dcflow::sensitivities(net, s);
    const auto st = dcflow::solve_flow(net, u, s);
    const Eigen::VectorXd uv = sens.layout.pack(u);
    for (std::size_t f = 0; f < net.feeders.size(); ++f) {
      const auto& fe = net.feeders[f];
      const double affine = sens.flow(static_cast<int>(f), uv);
      CHECK(std::abs(affine - st.flows.at({fe.from_bus, fe.to_bus})) <= 1e-9);
    }
    CHECK(std::abs(sens.slack_power(uv) - st.slack_power) <= 1e-9);
  }
}

TEST_CASE("production solve agrees with the dense reference oracle") {
  std::mt19937_64 gen(31415);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = random_five_bus(gen);
    const auto s = scenario_for(net, gen);
    const auto u = decision_for(net, gen);
    const auto fast = dcflow::solve_flow(net, u, s);
    const auto oracle = reference::solve_flow_dense(net, u, s);
    for (const auto& [key, flow] : fast.flows)
      CHECK(std::abs(flow - oracle.flows.at(key)) <= 1e-9);
    for (const auto& [bus, ang] : fast.angles)
      CHECK(std::abs(ang - oracle.angles.at(bus)) <= 1e-9);
    CHECK(std::abs(fast.slack_power - oracle.slack_power) <= 1e-9);
    CHECK(balance_residual(net, u, s, fast) <= 1e-8);
  }
}

TEST_CASE("reference oracle reproduces the hand cases") {
  {
    const auto net = two_bus();
    dcflow::Decision u;
    scenario::Scenario s;
    s.load[2] = 100.0;
    const auto st = reference::solve_flow_dense(net, u, s);
    CHECK(st.flows.at({1, 2}) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(st.slack_power == doctest::Approx(100.0).epsilon(1e-12));
  }
  {
    const auto net = triangle();
    dcflow::Decision u;
    scenario::Scenario s;
    s.load[3] = 90.0;
    const auto st = reference::solve_flow_dense(net, u, s);
    CHECK(st.flows.at({2, 3}) == doctest::Approx(30.0).epsilon(1e-10));
  }
}

TEST_CASE("solve_flow is linear in the decision") {
  std::mt19937_64 gen(99);
  const auto net = random_five_bus(gen);
  const auto s = scenario_for(net, gen);
  const auto u1 = decision_for(net, gen);
  const auto u2 = decision_for(net, gen);
  const auto st1 = dcflow::solve_flow(net, u1, s);
  const auto st2 = dcflow::solve_flow(net, u2, s);
  for (double a : {0.0, 0.25, 0.5, 1.0}) {
    dcflow::Decision mix;
    for (const auto& [bus, v] : u1.beta_w) mix.beta_w[bus] = a * v + (1 - a) * u2.beta_w.at(bus);
    for (const auto& [bus, v] : u1.p_g) mix.p_g[bus] = a * v + (1 - a) * u2.p_g.at(bus);
    const auto st = dcflow::solve_flow(net, mix, s);
    for (const auto& [key, flow] : st.flows) {
      const double expect = a * st1.flows.at(key) + (1 - a) * st2.flows.at(key);
      CHECK(std::abs(flow - expect) <= 1e-9);
    }
    CHECK(std::abs(st.slack_power - (a * st1.slack_power + (1 - a) * st2.slack_power)) <= 1e-9);
  }
}

TEST_CASE("decisions outside their boxes are rejected") {
  const auto net = triangle(true);
  scenario::Scenario s;
  s.load[3] = 90.0;
  dcflow::Decision u;
  u.p_g[3] = 400.0;  // box is [0, 300]
  CHECK_THROWS_AS((void)dcflow::solve_flow(net, u, s), std::invalid_argument);
}
