#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adactrl {

// Selects between the serial reference path and the OpenMP kernel. Both paths
// produce identical results for independent-slot workloads; the serial path is
// kept as the testing reference and benchmark baseline.
enum class Execution { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

// Runs fn(i) for i in [0, n). Parallel execution requires fn to write only to
// slot i's state. Exceptions never escape the OpenMP region: each slot's
// exception is captured and the lowest-index one is rethrown afterwards, the
// same exception the serial path would surface first.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::Parallel && n > 1) {
#ifdef _OPENMP
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace adactrl
