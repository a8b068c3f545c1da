#pragma once

#include <cstddef>
#include <numeric>
#include <span>

#include <omp.h>

namespace confimm {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path the tests compare against; `parallel` runs the OpenMP loop.
enum class Exec { serial, parallel };

inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int max_threads() { return omp_get_max_threads(); }

/// Runs fn(i) for i in [0, n). Iterations must be independent.
template <class Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  }
}

/// Same as for_each_index but with dynamic scheduling for uneven work.
template <class Fn>
void for_each_index_dynamic(Exec exec, std::size_t n, Fn&& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  }
}

// Reductions are done serially over per-node contributions so results do not
// depend on the thread count.
inline double ordered_sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace confimm
