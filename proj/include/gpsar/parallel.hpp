#ifndef GPSAR_PARALLEL_HPP
#define GPSAR_PARALLEL_HPP

#include <algorithm>
#include <thread>
#include <vector>

namespace gpsar {

/// Static block partition of [0, n) across `workers` threads. Each index is
/// handled by exactly one worker, so results cannot depend on the worker
/// count as long as fn(i) writes only to slot i.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t lo = n * t / w;
        const std::size_t hi = n * (t + 1) / w;
        threads.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace gpsar

#endif
