#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace torobs {

// Thread cap: TOROBS_THREADS if set, else hardware concurrency.
inline int max_threads() {
    static int cached = [] {
        if (const char* env = std::getenv("TOROBS_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }();
    return cached;
}

// Splits [0, n) into contiguous chunks and runs fn(begin, end) on each.
// Chunk boundaries do not depend on the thread count, so any per-index output
// written into preallocated slots is identical regardless of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    int threads = std::min<std::size_t>(max_threads(), n == 0 ? 1 : n);
    if (threads <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::size_t b = std::min(n, static_cast<std::size_t>(t) * chunk);
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back(fn, b, e);
    }
    for (auto& th : pool) th.join();
}

}  // namespace torobs
