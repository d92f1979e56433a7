#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace uniformize {

// Worker cap: min(hardware concurrency, UNIFORMIZE_THREADS when set).
int worker_count();

// Static partition of [0, count) over the worker pool. Each index is handled
// exactly once; callers write to index-addressed slots, so results do not
// depend on the degree of parallelism.
template <typename F>
void parallel_for(std::size_t count, F&& fn) {
    const int workers = worker_count();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += nthreads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace uniformize
