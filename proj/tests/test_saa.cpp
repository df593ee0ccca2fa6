#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ccopf/model.hpp"
#include "ccopf/parallel.hpp"
#include "ccopf/reference.hpp"
#include "ccopf/saa.hpp"

using namespace ccopf;
using saa::Variant;

namespace {

std::filesystem::path data_dir() {
  const char* d = std::getenv("CCOPF_DATA_DIR");
  return d != nullptr ? d : "data";
}

// single feeder with unit limit; scenario loads are the flow magnitudes
model::Network unit_feeder_net(double p_max = 1.0) {
  model::Network net;
  net.buses = {{1, true}, {2, false}};
  net.feeders = {{1, 2, 1000.0, p_max, 0.98}};
  net.slack_source = {1, 15.0, -1e9, 1e9};
  model::Load l;
  l.bus = 2;
  l.mean = 1.0;
  l.dist = {model::DistKind::PointMass, 0, 0, 0, 0, 1.0, -1e9, 1e9};
  net.loads = {l};
  return net;
}

scenario::ScenarioSet loads_set(const std::vector<double>& loads) {
  Eigen::ArrayXXd wind(static_cast<Eigen::Index>(loads.size()), 0);
  Eigen::ArrayXXd load(static_cast<Eigen::Index>(loads.size()), 1);
  for (std::size_t i = 0; i < loads.size(); ++i) load(static_cast<Eigen::Index>(i), 0) = loads[i];
  return scenario::ScenarioSet({}, {2}, wind, load);
}

// three-bus net with generators at buses 4 and 5 (table-price layout)
model::Network price_net() {
  model::Network net;
  net.buses = {{1, true}, {4, false}, {5, false}};
  net.feeders = {{1, 4, 1000.0, 1e6, 0.98}, {1, 5, 1000.0, 1e6, 0.98}, {4, 5, 1000.0, 1e6, 0.98}};
  net.generators = {{4, 10.0, 0.0, 400.0}, {5, 10.0, 0.0, 500.0}};
  net.slack_source = {1, 15.0, -1e6, 1e6};
  model::Load l;
  l.bus = 4;
  l.mean = 350.0;
  l.dist = {model::DistKind::PointMass, 0, 0, 0, 0, 350.0, 0.0, 1e6};
  net.loads = {l};
  return net;
}

scenario::ScenarioSet point_set(const model::Network& net) {
  return scenario::forecast_scenarios(net);
}

Eigen::VectorXd random_interior(const saa::AssembledProblem& ap, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const Eigen::VectorXd lo = ap.lower_bounds();
  const Eigen::VectorXd hi = ap.upper_bounds();
  Eigen::VectorXd u(lo.size());
  for (int k = 0; k < u.size(); ++k) u(k) = lo(k) + unit(gen) * (hi(k) - lo(k));
  return u;
}

}  // namespace

TEST_CASE("objective reproduces the priced dispatch arithmetic") {
  const auto net = price_net();
  const auto set = point_set(net);
  dcflow::Decision u;
  u.p_g[4] = 100.0;
  u.p_g[5] = 200.0;
  const auto obj = saa::objective(net, u, set);
  CHECK(obj.value == 3750.0);  // 10*100 + 10*200 + 15*50

  auto free_net = net;
  for (auto& g : free_net.generators) g.price = 0.0;
  free_net.slack_source.price = 0.0;
  const auto zero = saa::objective(free_net, u, point_set(free_net));
  CHECK(zero.value == 0.0);
}

TEST_CASE("objective gradient matches finite differences") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto set = scenario::generate_scenarios(net, 500, 3, scenario::Source::MonteCarlo);
  auto ap = saa::assemble(net, set, Variant::Inner, {0.1, 1.0, 1.0});
  std::mt19937_64 gen(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd u = random_interior(ap, gen);
    const auto vg = ap.objective(u);
    for (int k = 0; k < u.size(); ++k) {
      Eigen::VectorXd up = u, dn = u;
      up(k) += h;
      dn(k) -= h;
      const double fd = (ap.objective(up).value - ap.objective(dn).value) / (2 * h);
      CHECK(std::abs(vg.grad(k) - fd) / std::max({std::abs(fd), std::abs(vg.grad(k)), 1.0}) <=
            1e-7);
    }
  }
}

TEST_CASE("feeder margin is the two-sided limit gap") {
  model::Network net = unit_feeder_net(100.0);
  net.generators = {{2, 0.0, 0.0, 400.0}};
  dcflow::Decision u;
  u.p_g[2] = 0.0;
  scenario::Scenario s;
  s.load[2] = 90.0;
  CHECK(saa::feeder_margin(net, u, s, 0).h == doctest::Approx(-10.0).epsilon(1e-12));
  s.load[2] = -120.0;  // reversed flow
  CHECK(saa::feeder_margin(net, u, s, 0).h == doctest::Approx(20.0).epsilon(1e-12));
  s.load[2] = 0.0;  // flow exactly zero: sign(0) = 0 convention
  const auto m = saa::feeder_margin(net, u, s, 0);
  CHECK(m.h == doctest::Approx(-100.0).epsilon(1e-12));
  CHECK(m.grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("psi saturates at the tails") {
  const auto net = unit_feeder_net(1e6);
  dcflow::Decision u;
  const smoothing::SmoothingParams p{0.01, 1.0, 1.0};
  {
    const auto set = loads_set({0.0, 0.0, 0.0});  // margins -1e6
    CHECK(saa::psi_inner(net, u, set, 0, p).value <= 1e-9);
    CHECK(saa::phi_outer(net, u, set, 0, p).value ==
          doctest::Approx(1.0 + p.m1 * p.tau).epsilon(1e-6));
  }
  {
    const auto set = loads_set({2e6, 2e6, 2e6});  // margins +1e6
    CHECK(saa::psi_inner(net, u, set, 0, p).value >= 1.0);
    CHECK(saa::phi_outer(net, u, set, 0, p).value <= 1e-9);
  }
}

TEST_CASE("psi and phi at the four-margin sample set") {
  const auto net = unit_feeder_net(1.0);
  dcflow::Decision u;
  const auto set = loads_set({0.0, 0.0, 0.0, 2.0});  // margins {-1,-1,-1,+1}
  const smoothing::SmoothingParams p{0.01, 1.0, 1.0};
  CHECK(std::abs(saa::psi_inner(net, u, set, 0, p).value - 0.2525) < 1e-4);
  CHECK(std::abs(saa::phi_outer(net, u, set, 0, p).value - 0.7575) < 1e-4);
}

TEST_CASE("psi converges to the empirical violation rate as tau vanishes") {
  const auto net = unit_feeder_net(1.0);
  dcflow::Decision u;
  // normalized margins stay at least 10 scale units from the kink
  const auto set = loads_set({0.0, 0.5, 1.5, 2.0});
  const double rate = reference::violation_rate(net, u, set, 0);
  CHECK(rate == 0.5);
  for (double tau : {0.5, 0.25, 0.1, 0.05, 0.01}) {
    const smoothing::SmoothingParams p{tau, 1.0, 1.0};
    const double psi = saa::psi_inner(net, u, set, 0, p).value;
    CHECK(psi >= rate);  // majorant side
    CHECK(std::abs(psi - rate) <= 10.0 * tau * std::max(1.0, p.m1));
  }
}

TEST_CASE("bound penalty is the squared hinge over samples") {
  auto net = price_net();
  net.slack_source.p_min = 0.0;
  net.slack_source.p_max = 100.0;
  dcflow::Decision u;
  u.p_g[4] = 100.0;
  u.p_g[5] = 145.0;  // slack = 350 - 245 = 105 = p_max + 5
  const auto pen = saa::bound_penalty(net, u, point_set(net));
  CHECK(pen.value == doctest::Approx(25.0).epsilon(1e-12));

  u.p_g[5] = 200.0;  // slack = 50, inside bounds
  const auto zero = saa::bound_penalty(net, u, point_set(net));
  CHECK(zero.value == 0.0);
  CHECK(zero.grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bound penalty gradient matches finite differences at active violations") {
  auto net = model::load_network(data_dir() / "pjm5.json");
  net.slack_source.p_max = 320.0;  // force active slack-bound violations
  const auto set = scenario::generate_scenarios(net, 300, 17, scenario::Source::MonteCarlo);
  auto ap = saa::assemble(net, set, Variant::Inner, {0.1, 1.0, 1.0});
  std::mt19937_64 gen(29);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd u = random_interior(ap, gen);
    const auto pen = ap.bound_penalty(u);
    if (pen.value == 0.0) continue;
    for (int k = 0; k < u.size(); ++k) {
      Eigen::VectorXd up = u, dn = u;
      up(k) += h;
      dn(k) -= h;
      const double fd = (ap.bound_penalty(up).value - ap.bound_penalty(dn).value) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(pen.grad(k)), 1.0});
      CHECK(std::abs(pen.grad(k) - fd) / denom <= 1e-6);
    }
  }
}

TEST_CASE("smoothed constraint gradients match finite differences") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto set = scenario::generate_scenarios(net, 400, 23, scenario::Source::MonteCarlo);
  auto ap = saa::assemble(net, set, Variant::Inner, {0.05, 1.0, 1.0});
  std::mt19937_64 gen(31);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd u = random_interior(ap, gen);
    for (int f = 0; f < ap.constraint_count(); ++f) {
      const auto vg = ap.psi(u, f);
      for (int k = 0; k < u.size(); ++k) {
        Eigen::VectorXd up = u, dn = u;
        up(k) += h;
        dn(k) -= h;
        const double fd = (ap.psi(up, f).value - ap.psi(dn, f).value) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(vg.grad(k)), 1e-4});
        CHECK(std::abs(vg.grad(k) - fd) / denom <= 1e-5);
      }
    }
  }
}

TEST_CASE("majorant chain and nesting hold exactly on random decisions") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto set = scenario::generate_scenarios(net, 1000, 7, scenario::Source::MonteCarlo);
  std::mt19937_64 gen(11);
  for (double tau : {0.1, 0.01}) {
    auto ap = saa::assemble(net, set, Variant::Inner, {tau, 1.0, 1.0});
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd u = random_interior(ap, gen);
      for (const auto& probe : ap.probe(u)) {
        // theta majorizes the indicator sample-by-sample, so the averages
        // inherit the inequality exactly
        CHECK(probe.psi >= probe.violation_rate);
        CHECK(probe.phi >= probe.satisfaction_rate);
        if (probe.psi <= 1.0 - probe.alpha) CHECK(probe.violation_rate <= 1.0 - probe.alpha);
        if (probe.satisfaction_rate >= probe.alpha) CHECK(probe.phi >= probe.alpha);
      }
    }
  }
}

TEST_CASE("deterministic variant admits full wind at the case-1 forecast") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  auto ap = saa::assemble(net, point_set(net), Variant::Deterministic, {0.1, 1.0, 1.0});
  Eigen::VectorXd u(3);
  u << 1.0, 398.0, 500.0;
  const auto ev = ap.evaluate(u);
  CHECK(ev.constraints.maxCoeff() <= 0.0);
  CHECK(ev.penalty_raw == 0.0);
}

TEST_CASE("near-robust alpha forces near-zero theta averages") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto set = scenario::generate_scenarios(net, 500, 13, scenario::Source::MonteCarlo);
  auto ap = saa::assemble(net, set, Variant::Inner, {0.05, 1.0, 1.0});
  ap.set_alpha_override(1.0 - 1e-12);
  Eigen::VectorXd u = ap.default_start();
  const auto ev = ap.evaluate(u);
  const auto probes = ap.probe(u);
  bool some_positive = false;
  for (int f = 0; f < ap.constraint_count(); ++f) {
    CHECK(std::abs(ev.constraints(f) - probes[static_cast<std::size_t>(f)].psi) <= 1e-11);
    if (ev.constraints(f) > 0.0) some_positive = true;
  }
  CHECK(some_positive);  // effectively robust: only near-zero psi would pass
}

TEST_CASE("psi and phi agree with the serial dense-solve reference") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto set = scenario::generate_scenarios(net, 50, 19, scenario::Source::MonteCarlo);
  const smoothing::SmoothingParams p{0.05, 1.5, 1.0};
  dcflow::Decision u;
  u.beta_w[3] = 0.7;
  u.p_g[4] = 250.0;
  u.p_g[5] = 420.0;
  for (int f = 0; f < 6; ++f) {
    const double fast_psi = saa::psi_inner(net, u, set, f, p).value;
    const double fast_phi = saa::phi_outer(net, u, set, f, p).value;
    CHECK(fast_psi == doctest::Approx(reference::psi_value(net, u, set, f, p)).epsilon(1e-9));
    CHECK(fast_phi == doctest::Approx(reference::phi_value(net, u, set, f, p)).epsilon(1e-9));
  }
  const auto obj = saa::objective(net, u, set);
  CHECK(obj.value == doctest::Approx(reference::objective_value(net, u, set)).epsilon(1e-9));
}

TEST_CASE("evaluation is bitwise identical across worker counts") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto set = scenario::generate_scenarios(net, 2000, 4, scenario::Source::MonteCarlo);
  auto ap = saa::assemble(net, set, Variant::Inner, {0.02, 1.0, 1.0});
  std::mt19937_64 gen(3);
  const Eigen::VectorXd u = random_interior(ap, gen);

  parallel::set_thread_override(1);
  const auto e1 = ap.evaluate(u);
  parallel::set_thread_override(4);
  const auto e4 = ap.evaluate(u);
  parallel::set_thread_override(0);

  CHECK(e1.objective == e4.objective);
  CHECK(e1.penalty_raw == e4.penalty_raw);
  CHECK((e1.constraints.array() == e4.constraints.array()).all());
  CHECK((e1.constraint_grads.array() == e4.constraint_grads.array()).all());
  CHECK((e1.penalty_grad_raw.array() == e4.penalty_grad_raw.array()).all());
}

TEST_CASE("assemble rejects mismatched scenario schemas") {
  const auto net = model::load_network(data_dir() / "pjm5.json");
  const auto bad = loads_set({1.0, 2.0});
  CHECK_THROWS_AS(saa::assemble(net, bad, Variant::Inner, {0.1, 1.0, 1.0}),
                  scenario::SchemaError);
}
