#pragma once

#include <cstddef>
#include <functional>

namespace steerkit {

/// Number of worker threads used by parallel_for. 0 selects the hardware
/// concurrency (or STEERKIT_THREADS from the environment when set).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for every i in [0, n). Each index must write only to storage
/// it owns, so results never depend on the schedule. Nested calls run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace steerkit
