#pragma once

#include <cstddef>
#include <span>

namespace ccopf::parallel {

// Worker cap, resolved from CCOPF_THREADS on first use (default: machine
// parallelism).  Tests and benchmarks may override in-process.
int thread_count();
void set_thread_override(int n);  // n <= 0 clears the override

// Pairwise (tree) sum of a buffer.  The reduction order depends only on the
// buffer length, never on the thread schedule, so results are bitwise
// reproducible for any worker count.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

}  // namespace ccopf::parallel
