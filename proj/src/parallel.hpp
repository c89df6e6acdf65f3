#pragma once

#include <exception>

#include "cavityfock/execution.hpp"

namespace cavityfock::detail {

// Runs body(i) for i in [0, count). In parallel mode exceptions are caught
// inside the OpenMP region and the one from the lowest index is rethrown, so
// both modes report the same error.
template <class Body>
void for_each_index(long count, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  long failed_at = count;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(cavityfock_for_each_index)
      if (i < failed_at) {
        failed_at = i;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cavityfock::detail
