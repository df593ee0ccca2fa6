#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/model.hpp"
#include "ccopf/scenario.hpp"

namespace ccopf::dcflow {

class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decision vector u of the OPF: curtailment factors and conventional dispatch.
struct Decision {
  std::map<int, double> beta_w;  // wind bus -> curtailment factor in [0,1]
  std::map<int, double> p_g;     // generator bus -> MW
};

// Fixed packing order for the decision vector: wind buses ascending, then
// generator buses ascending.
struct DecisionLayout {
  std::vector<int> wind_buses;
  std::vector<int> gen_buses;

  static DecisionLayout from_network(const model::Network& net);

  int dim() const { return static_cast<int>(wind_buses.size() + gen_buses.size()); }
  int wind_count() const { return static_cast<int>(wind_buses.size()); }
  int gen_count() const { return static_cast<int>(gen_buses.size()); }

  Eigen::VectorXd pack(const Decision& u) const;
  Decision unpack(const Eigen::VectorXd& u) const;
  Eigen::VectorXd lower_bounds(const model::Network& net) const;
  Eigen::VectorXd upper_bounds(const model::Network& net) const;
};

// Per-sample network state solved from the nodal balance.
struct SampleState {
  std::map<int, double> angles;                  // bus -> rad, slack pinned to 0
  std::map<std::pair<int, int>, double> flows;   // canonical (from,to) -> MW
  double slack_power = 0.0;                      // MW
};

// Affine map u -> (feeder flows, slack power) for one scenario; exact by
// linearity of the DC equations.
struct AffineSensitivity {
  DecisionLayout layout;
  std::vector<std::pair<int, int>> feeder_keys;
  Eigen::VectorXd feeder_const;  // MW at u = 0
  Eigen::MatrixXd feeder_grad;   // F x dim, MW per decision unit
  double slack_const = 0.0;
  Eigen::VectorXd slack_grad;

  double flow(int feeder, const Eigen::VectorXd& u) const {
    return feeder_const(feeder) + feeder_grad.row(feeder).dot(u);
  }
  double slack_power(const Eigen::VectorXd& u) const { return slack_const + slack_grad.dot(u); }
};

// Reduced susceptance system, factored once per network and shared read-only.
class FlowModel {
 public:
  explicit FlowModel(const model::Network& net);

  const model::Network& network() const { return net_; }
  const DecisionLayout& layout() const { return layout_; }
  int bus_count() const { return static_cast<int>(bus_ids_.size()); }
  int feeder_count() const { return static_cast<int>(net_.feeders.size()); }
  const std::vector<int>& bus_ids() const { return bus_ids_; }  // ascending
  int bus_position(int bus_id) const;
  int slack_position() const { return slack_pos_; }

  // angle response (rad) per unit injection (MW); slack row/column are zero
  const Eigen::MatrixXd& angle_response() const { return angle_response_; }
  // feeder flow response (MW) per unit injection at each bus; slack column zero
  const Eigen::MatrixXd& feeder_ptdf() const { return feeder_ptdf_; }

  SampleState solve(const Decision& u, const scenario::Scenario& s) const;
  AffineSensitivity sensitivities(const scenario::Scenario& s) const;

 private:
  Eigen::VectorXd injections(const Decision& u, const scenario::Scenario& s) const;

  model::Network net_;
  DecisionLayout layout_;
  std::vector<int> bus_ids_;
  int slack_pos_ = -1;
  Eigen::MatrixXd angle_response_;  // Nb x Nb
  Eigen::MatrixXd feeder_ptdf_;     // F x Nb
};

// Convenience single-shot forms.
SampleState solve_flow(const model::Network& net, const Decision& u, const scenario::Scenario& s);
AffineSensitivity sensitivities(const model::Network& net, const scenario::Scenario& s);

}  // namespace ccopf::dcflow
