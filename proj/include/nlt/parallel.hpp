#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nlt {

/// Number of worker threads: hardware concurrency capped by the
/// NONLOCAL_THREADS environment variable (values < 1 mean "serial").
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NONLOCAL_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        else n = 1;
    }
    return n;
}

/// Static block-partitioned parallel loop over [0, n). Each index is visited
/// exactly once by exactly one thread; `f` must only write state owned by its
/// index so results are identical for any thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&f, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace nlt
