#pragma once

#include <cstddef>
#include <functional>

namespace copularank {

/// Process-wide cap on worker threads (0 restores the hardware default).
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(worker, index) for every index in [0, count). Indices are handed
/// out dynamically; callers that need schedule-independent results must make
/// each index's work a pure function of the index. If any body throws, the
/// exception from the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count,
                  const std::function<void(unsigned worker, std::size_t index)>& body);

/// Number of workers parallel_for will use for `count` items.
unsigned worker_count(std::size_t count);

}  // namespace copularank
