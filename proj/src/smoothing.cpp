#include "ccopf/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ccopf::smoothing {

double indicator(double s) { return s >= 0.0 ? 1.0 : 0.0; }

namespace {
// exp with the argument clamped before the deep-underflow band; results below
// the smallest normal double are floored anyway, and glibc's exp is slow there
inline double exp_nonpos(double arg) { return arg <= -708.0 ? 0.0 : std::exp(arg); }
}  // namespace

double theta(const SmoothingParams& p, double s) {
  const double num = 1.0 + p.m1 * p.tau;
  if (s >= 0.0) {
    // exp argument <= 0, no overflow; at s == 0 with m1 == m2 the numerator
    // and denominator are the same expression, so the result is exactly 1.
    return num / (1.0 + p.m2 * p.tau * exp_nonpos(-s / p.tau));
  }
  // rewrite with e = exp(s/tau) <= 1 to avoid overflow for s << 0
  const double e = exp_nonpos(s / p.tau);
  const double v = num * e / (e + p.m2 * p.tau);
  return std::max(v, std::numeric_limits<double>::min());
}

double theta_ds(const SmoothingParams& p, double s) {
  const double num = (1.0 + p.m1 * p.tau) * p.m2;
  double v;
  if (s >= 0.0) {
    const double e = exp_nonpos(-s / p.tau);
    const double d = 1.0 + p.m2 * p.tau * e;
    v = num * e / (d * d);
  } else {
    const double e = exp_nonpos(s / p.tau);
    const double d = e + p.m2 * p.tau;
    v = num * e / (d * d);
  }
  return std::max(v, std::numeric_limits<double>::min());
}

MajorantCheck check_majorant(const SmoothingParams& p, std::span<const double> grid) {
  if (!p.valid()) throw std::invalid_argument("invalid smoothing parameters");
  if (grid.empty()) throw std::invalid_argument("empty majorant grid");
  const auto [lo_it, hi_it] = std::minmax_element(grid.begin(), grid.end());
  if (*lo_it > -50.0 * p.tau || *hi_it < 50.0 * p.tau)
    throw std::invalid_argument("majorant grid must span [-50*tau, 50*tau]");

  MajorantCheck res;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (double s : grid) {
    const double margin = theta(p, s) - indicator(s);
    if (margin < res.worst_margin) {
      res.worst_margin = margin;
      res.worst_s = s;
    }
  }
  res.holds = res.worst_margin >= 0.0;
  return res;
}

MajorantCheck check_majorant(const SmoothingParams& p) {
  if (!p.valid()) throw std::invalid_argument("invalid smoothing parameters");
  return check_majorant(p, uniform_grid(-50.0 * p.tau, 50.0 * p.tau, p.tau / 10.0));
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("bad grid spec");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  g.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  if (g.back() < hi) g.push_back(hi);
  return g;
}

}  // namespace ccopf::smoothing
