#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/model.hpp"

namespace ccopf::scenario {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Source { MonteCarlo, QuasiMonteCarlo };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

// One joint draw of the random vector (wind power and demand per bus).
struct Scenario {
  int sample_index = 0;
  std::map<int, double> wind;  // bus -> MW
  std::map<int, double> load;  // bus -> MW
};

// Column-oriented sample store; rows are scenarios in index order.
class ScenarioSet {
 public:
  ScenarioSet() = default;
  ScenarioSet(std::vector<int> wind_buses, std::vector<int> load_buses, Eigen::ArrayXXd wind,
              Eigen::ArrayXXd load);

  std::size_t count() const { return static_cast<std::size_t>(wind_.rows()); }
  const std::vector<int>& wind_buses() const { return wind_buses_; }
  const std::vector<int>& load_buses() const { return load_buses_; }
  const Eigen::ArrayXXd& wind() const { return wind_; }  // count x n_wind
  const Eigen::ArrayXXd& load() const { return load_; }  // count x n_load
  Scenario scenario(std::size_t i) const;

  // generation provenance (for the verification-independence audit)
  std::uint64_t seed = 0;
  Source source = Source::MonteCarlo;
  std::uint64_t qmc_offset = 0;
  bool provenance_known = false;

 private:
  std::vector<int> wind_buses_, load_buses_;
  Eigen::ArrayXXd wind_, load_;
};

// `count` i.i.d. Beta(a, b) draws in (0,1); bitwise reproducible per
// (a, b, count, seed).
std::vector<double> sample_beta(double a, double b, std::size_t count, std::uint64_t seed);

// First `count` Halton points starting at `start_index` (default 1), using the
// first `dimension` primes as bases.  Rows are points.
Eigen::ArrayXXd halton(int dimension, std::size_t count, std::uint64_t start_index = 1);

// Inverse CDF of a distribution spec, mapped to its support.
double inverse_cdf(const model::DistributionSpec& d, double p);

// Forward CDF (used by verification tests).
double cdf(const model::DistributionSpec& d, double x);

// Draws `count` joint scenarios.  Monte Carlo uses per-index substreams of
// `seed`, so the result is independent of worker count; quasi-Monte Carlo maps
// Halton points (from `qmc_offset`) through each component's inverse CDF.
ScenarioSet generate_scenarios(const model::Network& net, std::size_t count, std::uint64_t seed,
                               Source source, std::uint64_t qmc_offset = 1);

// Degenerate single-scenario set at forecast wind / mean load.
ScenarioSet forecast_scenarios(const model::Network& net);

// CSV persistence; save also writes `<path>.manifest.json` with provenance,
// which load restores when present.
void save_scenarios(const ScenarioSet& set, const std::filesystem::path& path);
ScenarioSet load_scenarios(const std::filesystem::path& path);

// Verifies that the set's columns match the network's wind/load buses.
void validate_schema(const model::Network& net, const ScenarioSet& set);

}  // namespace ccopf::scenario
