#pragma once

#include <cstdlib>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace osc {

/// Worker count: OSCULATE_THREADS caps the OpenMP thread pool.
inline int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("OSCULATE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
#else
  return 1;
#endif
}

/// Data-parallel loop over [0, n).  Each index writes disjoint output and
/// performs its own fixed-order summation, so results are bit-identical to
/// the serial reference regardless of the schedule.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
  int nw = worker_count();
#pragma omp parallel for schedule(static) num_threads(nw)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace osc
