#pragma once

#include <cstddef>

#ifdef SWARMKLD_HAVE_OPENMP
#include <omp.h>
#endif

namespace swarmkld {

/// Execution policy for per-particle kernels. `serial` is the reference
/// path; `parallel` runs the same loop body under OpenMP. Because every
/// iteration draws from its own forked stream and reductions happen after
/// the loop in index order, both policies give bit-identical results.
enum class Exec { serial, parallel };

template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
#ifdef SWARMKLD_HAVE_OPENMP
  if (exec == Exec::parallel) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)exec;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

inline int max_threads() noexcept {
#ifdef SWARMKLD_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace swarmkld
