#ifndef PSPROG_PARALLEL_HPP
#define PSPROG_PARALLEL_HPP

#include <functional>

namespace psprog {

// Thread count resolution: explicit request > PSPROG_THREADS env var >
// hardware concurrency.
int resolve_threads(int requested = 0);

// Splits [begin, end) into a fixed set of contiguous chunks and runs
// chunk_fn(chunk_begin, chunk_end) on worker threads.  The chunk layout
// depends only on (begin, end, chunks), never on scheduling, so writers to
// per-index slots stay deterministic.
void parallel_for(long begin, long end, int threads,
                  const std::function<void(long, long)>& chunk_fn);

}  // namespace psprog

#endif  // PSPROG_PARALLEL_HPP
