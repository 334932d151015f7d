#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace fraclab {

/// Serial is the reference path; Parallel must produce bitwise-identical per-index results.
enum class Execution { Serial, Parallel };

/// True when the library was built with OpenMP.
bool parallel_available();
int max_threads();

/// Calls fn(i) for i in [0, n). Each index writes only its own output slot, so results do not
/// depend on scheduling. The first exception (by index) is rethrown after the loop.
template <class F>
void parallel_for(std::size_t n, Execution exec, F&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
  if (exec == Execution::Parallel) {
#ifdef FRACLAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fraclab
