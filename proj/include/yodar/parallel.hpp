#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace yodar {

// Worker cap: YODAR_THREADS when set, else hardware concurrency.
inline unsigned max_threads() {
    if (const char* env = std::getenv("YODAR_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0, n) across worker threads. Callers must write
// results into index-addressed slots so the output is order-independent.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        threads.emplace_back([=, &fn] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : threads) t.join();
}

}  // namespace yodar
