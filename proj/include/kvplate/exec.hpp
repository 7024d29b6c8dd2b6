#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace kvplate {

/// Execution policy for the data-parallel kernels. Every kernel keeps a
/// serial path; the parallel path must produce bit-identical results.
enum class Exec { serial, parallel };

/// Calls body(i) for i in [0, n). Iterations must not share mutable state.
/// The first exception thrown by any iteration is rethrown on the caller.
template <class Body>
void for_each_index(Exec exec, std::ptrdiff_t n, Body&& body) {
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n > 0 ? n : 0));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int hardware_threads();

}  // namespace kvplate
