#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace coe::parallel {

// Runs fn(i) for i in [0, n) on up to `threads` OpenMP threads. An exception
// thrown by any iteration is rethrown after the loop; when several fail, the
// one with the lowest index wins so failures are reproducible.
template <typename Fn>
void for_each_index(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace coe::parallel
