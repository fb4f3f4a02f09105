#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace rsm::parallel {

/// Worker count used by every parallel region in the library. Results never
/// depend on it: each job writes its own output slot and reductions happen
/// serially afterwards in index order.
void set_jobs(int n);
int jobs();

/// Runs f(i) for i in [0, n) on the worker pool. If any call throws, the
/// exception from the lowest failing index is rethrown after the loop.
template <typename F>
void for_each_index(std::size_t n, F&& f) {
  const int workers = jobs();
  if (workers <= 1 || n <= 1 || omp_in_parallel()) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace rsm::parallel
