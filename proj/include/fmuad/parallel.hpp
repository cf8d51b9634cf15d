#ifndef FMUAD_PARALLEL_HPP
#define FMUAD_PARALLEL_HPP

#include <algorithm>
#include <thread>
#include <vector>

namespace fmuad {

inline int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n). Each index is processed exactly once; callers
// that need deterministic aggregation should write into per-index slots and
// reduce sequentially afterwards.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (n <= 0) return;
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([=]() {
            for (int i = w; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fmuad

#endif
