// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_PARALLEL_HPP
#define MLFETI_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef MLFETI_HAVE_OPENMP
#include <omp.h>
#endif

namespace mlfeti {

/// Selects between the OpenMP kernels and the serial reference path. Both
/// paths perform the same per-subdomain arithmetic in the same order, so
/// results are bitwise identical; the serial path is what the tests compare
/// against.
enum class Execution { serial, parallel };

inline int max_threads() {
#ifdef MLFETI_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs f(i) for i in [0, n). Iterations must write disjoint data. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class F>
void for_each_index(Execution exec, std::size_t n, F&& f) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef MLFETI_HAVE_OPENMP
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

}  // namespace mlfeti

#endif  // MLFETI_PARALLEL_HPP
