#pragma once

#include <cstddef>
#include <functional>

namespace mrelax {

// Worker count from MRELAX_THREADS (default 1; values above the hardware
// concurrency are clamped).
unsigned env_thread_count();

// Runs fn(i) for i in [0, count) across env_thread_count() workers with a
// static block partition. Results written by index are deterministic
// regardless of the thread count. Exceptions from workers are rethrown.
void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace mrelax
