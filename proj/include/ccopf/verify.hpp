#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ccopf/nlp.hpp"

namespace ccopf::verify {

enum class Method { Qmc, Mc };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

// Halton start index for verification streams; training generation starts at
// index 1, so the two never overlap for training sets below 2^20 points.
inline constexpr std::uint64_t kVerificationQmcOffset = (1ull << 20) + 1;

struct FeederProbability {
  int from = 0, to = 0;
  double probability = 0.0;  // Pr{|P| <= P_max}
};

struct ProbabilityTable {
  std::vector<FeederProbability> entries;  // network feeder order
  std::size_t points = 0;
  Method method = Method::Qmc;
  std::uint64_t seed = 0;        // mc provenance
  std::uint64_t qmc_offset = 0;  // qmc provenance
};

// Estimates the true per-feeder satisfaction probabilities on fresh samples.
ProbabilityTable true_probability(const model::Network& net, const dcflow::Decision& u,
                                  std::size_t points, Method method, std::uint64_t seed = 9001,
                                  std::uint64_t qmc_offset = kVerificationQmcOffset);

struct TrajectoryBundle {
  std::vector<std::pair<int, int>> feeder_keys;
  Eigen::ArrayXXd flows;      // N x F, MW
  Eigen::ArrayXd slack;       // N, MW
  Eigen::ArrayXd cost;        // N, $/h objective integrand per sample
  dcflow::Decision decision;  // the fixed decision the rows were solved under
};

TrajectoryBundle trajectories(const model::Network& net, const dcflow::Decision& u,
                              const scenario::ScenarioSet& set);

struct FeederComparison {
  int from = 0, to = 0;
  double alpha = 0.0;
  std::size_t stochastic_violations = 0, deterministic_violations = 0;
  double stochastic_rate = 0.0, deterministic_rate = 0.0;
  bool flagged = false;  // deterministic breaks alpha while stochastic holds it
};

struct Comparison {
  std::vector<FeederComparison> feeders;
  std::size_t flagged_count = 0;
  double stochastic_objective = 0.0;
  double deterministic_objective = 0.0;
  std::size_t sample_count = 0;
};

Comparison compare(const model::Network& net, const scenario::ScenarioSet& set,
                   const nlp::SolveReport& stochastic, const nlp::SolveReport& deterministic);

// Emission helpers (formats fixed by the CLI contract).
std::string probability_matrix_csv(const ProbabilityTable& table, const model::Network& net);
std::string trajectory_csv(const TrajectoryBundle& bundle);

}  // namespace ccopf::verify
