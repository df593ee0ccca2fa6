#pragma once

#include <array>
#include <cstdint>

namespace ccopf::rng {

// xoshiro256++ with splitmix64 seeding.  Hand-rolled so sampled bitstreams
// are stable across standard libraries; substreams are keyed by (seed, index)
// which makes per-scenario generation order-independent.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : Engine(seed, 0) {}
  Engine(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t next();

  double uniform01();   // open interval (0,1)
  double normal();      // standard normal, Box-Muller pair cached
  double gamma(double shape);   // unit scale, Marsaglia-Tsang
  double beta(double a, double b);

 private:
  std::array<std::uint64_t, 4> state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ccopf::rng
