#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace freqdiff {

// Runs fn(0..n-1); results must not depend on execution order. Callers that
// need determinism derive per-index RNG streams and write to per-index slots.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    int nt = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int k = 0; k < nt; ++k)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace freqdiff
