#pragma once

#include <span>
#include <vector>

namespace ccopf::smoothing {

// Parameters of the sigmoid-like kernel
//   theta(tau, s) = (1 + m1*tau) / (1 + m2*tau*exp(-s/tau)).
// m1 >= m2 makes theta a pointwise majorant of the step indicator, which is
// what the conservative (inner) problem relies on; callers that need that
// property check is_majorant().
struct SmoothingParams {
  double tau = 0.1;
  double m1 = 1.0;
  double m2 = 1.0;

  bool valid() const { return tau > 0.0 && tau < 1.0 && m1 > 0.0 && m2 > 0.0; }
  bool is_majorant() const { return m1 >= m2; }
};

// Step indicator: 1 for s >= 0, else 0.
double indicator(double s);

// Overflow-safe evaluation of theta; value in (0, 1 + m1*tau).
double theta(const SmoothingParams& p, double s);

// Exact derivative d theta / d s, overflow-safe, strictly positive.
double theta_ds(const SmoothingParams& p, double s);

struct MajorantCheck {
  bool holds = false;
  double worst_margin = 0.0;  // min over grid of theta - indicator
  double worst_s = 0.0;
};

// Verifies theta >= indicator over an explicit grid of s values.
MajorantCheck check_majorant(const SmoothingParams& p, std::span<const double> grid);

// Convenience: uniform grid spanning [-50*tau, 50*tau] with step tau/10.
MajorantCheck check_majorant(const SmoothingParams& p);

std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace ccopf::smoothing
