#pragma once

#include <cstddef>
#include <functional>

namespace dinterp {

// Worker count used by parallel_for; 0 selects the hardware concurrency.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Calls body(i) for i in [0, n). Indices are split into contiguous blocks, one
// per worker; callers write to per-index slots so results never depend on the
// schedule. If bodies throw, the exception from the lowest
// failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dinterp
