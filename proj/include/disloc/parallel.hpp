#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disloc {

// Serial is the reference implementation used to validate the OpenMP kernels;
// Parallel must produce identical results (each index is independent).
enum class ExecutionPolicy { Serial, Parallel };

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void parallel_for(std::int64_t n, ExecutionPolicy policy, int threads, F&& body) {
  if (policy == ExecutionPolicy::Serial || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  (void)threads;
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

template <class F>
void parallel_for(std::int64_t n, ExecutionPolicy policy, F&& body) {
  parallel_for(n, policy, 0, static_cast<F&&>(body));
}

}  // namespace disloc
