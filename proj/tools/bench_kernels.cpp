// Benchmarks the OpenMP evaluation kernels against the serial reference
// implementations that the tests use as oracles.

#include <benchmark/benchmark.h>

#include <memory>

#include "ccopf/model.hpp"
#include "ccopf/parallel.hpp"
#include "ccopf/reference.hpp"
#include "ccopf/saa.hpp"
#include "ccopf/scenario.hpp"
#include "ccopf/verify.hpp"

namespace {

using namespace ccopf;

struct Fixture {
  model::Network net;
  scenario::ScenarioSet set;
  std::unique_ptr<saa::AssembledProblem> problem;
  Eigen::VectorXd u;
  dcflow::Decision decision;

  explicit Fixture(std::size_t count) {
    net = model::load_network(DATA_DIR "/pjm5_case3.json");
    set = scenario::generate_scenarios(net, count, 42, scenario::Source::MonteCarlo);
    problem = std::make_unique<saa::AssembledProblem>(net, set, saa::Variant::Inner,
                                                      smoothing::SmoothingParams{0.01, 1.0, 1.0});
    u = problem->default_start();
    u(0) = 0.77;
    decision = problem->layout().unpack(u);
  }
};

Fixture& fixture(std::size_t count) {
  static Fixture small(2000);
  static Fixture big(20000);
  return count >= 20000 ? big : small;
}

void BM_SaaEvaluate_Kernel(benchmark::State& state) {
  auto& fx = fixture(static_cast<std::size_t>(state.range(0)));
  parallel::set_thread_override(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto ev = fx.problem->evaluate(fx.u);
    benchmark::DoNotOptimize(ev.merit);
  }
  parallel::set_thread_override(0);
}
BENCHMARK(BM_SaaEvaluate_Kernel)
    ->Args({2000, 1})
    ->Args({2000, 0})
    ->Args({20000, 1})
    ->Args({20000, 0})
    ->Unit(benchmark::kMillisecond);

// per-scenario dense solves, plain serial loop
void BM_SaaPsi_Reference(benchmark::State& state) {
  auto& fx = fixture(2000);
  const smoothing::SmoothingParams p{0.01, 1.0, 1.0};
  for (auto _ : state) {
    double acc = 0.0;
    for (int f = 0; f < 6; ++f)
      acc += reference::psi_value(fx.net, fx.decision, fx.set, f, p);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_SaaPsi_Reference)->Unit(benchmark::kMillisecond);

void BM_GenerateScenarios(benchmark::State& state) {
  auto& fx = fixture(2000);
  parallel::set_thread_override(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto set = scenario::generate_scenarios(fx.net, static_cast<std::size_t>(state.range(0)), 7,
                                            scenario::Source::MonteCarlo);
    benchmark::DoNotOptimize(set.wind().data());
  }
  parallel::set_thread_override(0);
}
BENCHMARK(BM_GenerateScenarios)
    ->Args({20000, 1})
    ->Args({20000, 0})
    ->Unit(benchmark::kMillisecond);

void BM_TrueProbability_Kernel(benchmark::State& state) {
  auto& fx = fixture(2000);
  parallel::set_thread_override(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto table =
        verify::true_probability(fx.net, fx.decision, 1 << 14, verify::Method::Qmc);
    benchmark::DoNotOptimize(table.entries.data());
  }
  parallel::set_thread_override(0);
}
BENCHMARK(BM_TrueProbability_Kernel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_TrueProbability_Reference(benchmark::State& state) {
  auto& fx = fixture(2000);
  const auto fresh = scenario::generate_scenarios(fx.net, 1 << 12, 0,
                                                  scenario::Source::QuasiMonteCarlo,
                                                  verify::kVerificationQmcOffset);
  for (auto _ : state) {
    double acc = 0.0;
    for (int f = 0; f < 6; ++f)
      acc += reference::satisfaction_probability(fx.net, fx.decision, fresh, f);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_TrueProbability_Reference)->Unit(benchmark::kMillisecond);

void BM_FlowSolve_Reduced(benchmark::State& state) {
  auto& fx = fixture(2000);
  dcflow::FlowModel fm(fx.net);
  const auto s = fx.set.scenario(0);
  for (auto _ : state) {
    auto st = fm.solve(fx.decision, s);
    benchmark::DoNotOptimize(st.slack_power);
  }
}
BENCHMARK(BM_FlowSolve_Reduced);

void BM_FlowSolve_DenseReference(benchmark::State& state) {
  auto& fx = fixture(2000);
  const auto s = fx.set.scenario(0);
  for (auto _ : state) {
    auto st = reference::solve_flow_dense(fx.net, fx.decision, s);
    benchmark::DoNotOptimize(st.slack_power);
  }
}
BENCHMARK(BM_FlowSolve_DenseReference);

}  // namespace

BENCHMARK_MAIN();
