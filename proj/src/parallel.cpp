#include "psprog/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace psprog {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PSPROG_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(long begin, long end, int threads,
                  const std::function<void(long, long)>& chunk_fn) {
    if (end <= begin) return;
    threads = resolve_threads(threads);
    const long total = end - begin;
    if (threads <= 1 || total <= 1) {
        chunk_fn(begin, end);
        return;
    }
    if (threads > total) threads = static_cast<int>(total);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const long step = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long lo = begin + t * step;
        long hi = std::min(end, lo + step);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { chunk_fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace psprog
