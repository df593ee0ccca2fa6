#pragma once

#include "ccopf/dcflow.hpp"
#include "ccopf/smoothing.hpp"

namespace ccopf::reference {

// Serial reference implementations, deliberately structured differently from
// the production kernels: the flow solve pins the slack angle in a full-size
// system (QR-factored per call) instead of reusing the reduced factorization,
// and the sample averages are plain left-to-right loops over per-scenario
// solves.  They exist as independent oracles for the tests and as the serial
// baseline for the benchmark target.

dcflow::SampleState solve_flow_dense(const model::Network& net, const dcflow::Decision& u,
                                     const scenario::Scenario& s);

double psi_value(const model::Network& net, const dcflow::Decision& u,
                 const scenario::ScenarioSet& set, int feeder,
                 const smoothing::SmoothingParams& p);

double phi_value(const model::Network& net, const dcflow::Decision& u,
                 const scenario::ScenarioSet& set, int feeder,
                 const smoothing::SmoothingParams& p);

double violation_rate(const model::Network& net, const dcflow::Decision& u,
                      const scenario::ScenarioSet& set, int feeder);

double objective_value(const model::Network& net, const dcflow::Decision& u,
                       const scenario::ScenarioSet& set);

double bound_penalty_value(const model::Network& net, const dcflow::Decision& u,
                           const scenario::ScenarioSet& set);

double satisfaction_probability(const model::Network& net, const dcflow::Decision& u,
                                const scenario::ScenarioSet& set, int feeder);

}  // namespace ccopf::reference
