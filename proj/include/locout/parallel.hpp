#pragma once

#include <cstdint>
#include <functional>

namespace locout {

// Resolve a worker count: requested > 0 wins, otherwise the LOCOUT_THREADS
// environment variable, otherwise std::thread::hardware_concurrency().
int resolve_threads(int requested);

// Run fn(i) for i in [begin, end) on up to `threads` workers using static
// contiguous blocks. Each index is processed exactly once, so results are
// independent of the worker count as long as fn writes only to slot i.
// If several tasks throw, the exception of the smallest index is rethrown.
void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t)>& fn);

} // namespace locout
