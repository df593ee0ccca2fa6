#include "ccopf/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace ccopf::parallel {

namespace {
std::atomic<int> g_override{0};

int env_thread_count() {
  const char* env = std::getenv("CCOPF_THREADS");
  if (env != nullptr) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to machine default
    }
  }
  return omp_get_max_threads();
}
}  // namespace

int thread_count() {
  int forced = g_override.load(std::memory_order_relaxed);
  if (forced >= 1) return forced;
  static const int from_env = env_thread_count();
  return from_env;
}

void set_thread_override(int n) { g_override.store(n, std::memory_order_relaxed); }

namespace {
// Serial base case kept small so the tree shape dominates the rounding
// behaviour; boundaries depend only on (offset, length).
constexpr std::size_t kLeaf = 32;

double sum_range(const double* v, std::size_t n) {
  if (n <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return sum_range(v, half) + sum_range(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> values) {
  return sum_range(values.data(), values.size());
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

}  // namespace ccopf::parallel
