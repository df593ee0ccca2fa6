#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ccopf::model {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string message, std::vector<std::string> violations)
      : std::runtime_error(std::move(message)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct Bus {
  int id = 0;
  bool is_slack = false;
};

enum class DistKind { Beta, TruncatedNormal, PointMass };

struct DistributionSpec {
  DistKind kind = DistKind::PointMass;
  double a = 0.0, b = 0.0;       // beta shapes
  double mu = 0.0, sigma = 0.0;  // truncated normal
  double value = 0.0;            // point mass
  double lo = 0.0, hi = 0.0;     // support in MW

  double mean() const;  // analytic mean on the support
};

struct Feeder {
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 0.0;  // MW per radian
  double p_max = 0.0;        // MW
  double alpha = 0.98;       // probability level
};

struct Generator {
  int bus = 0;
  double price = 0.0;  // $/MWh
  double p_min = 0.0, p_max = 0.0;
};

struct SlackSource {
  int bus = 0;
  double price = 0.0;
  double p_min = 0.0, p_max = 0.0;
};

struct WindFarm {
  int bus = 0;
  double p_max = 0.0;
  double forecast = 0.0;
  DistributionSpec dist;
};

struct Load {
  int bus = 0;
  double mean = 0.0;
  DistributionSpec dist;
};

struct Network {
  std::vector<Bus> buses;
  std::vector<Feeder> feeders;
  std::vector<Generator> generators;
  SlackSource slack_source;
  std::vector<WindFarm> wind_farms;
  std::vector<Load> loads;
  double angle_min = -0.5236;
  double angle_max = 0.5236;

  int slack_bus() const;
  bool has_bus(int id) const;
  std::vector<int> wind_buses() const;  // ascending
  std::vector<int> gen_buses() const;   // ascending
  std::vector<int> load_buses() const;  // ascending
  const Feeder& feeder(int index) const { return feeders.at(static_cast<std::size_t>(index)); }
};

// Parses and validates; throws ParseError on malformed input and
// ValidationError listing every violated invariant otherwise.
Network load_network(const std::filesystem::path& path);
Network network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const Network& net);

// Returns every violated invariant (empty when the network is valid).
std::vector<std::string> validate_network(const Network& net);

}  // namespace ccopf::model
