#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace ctsr {

inline unsigned hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

// Runs fn(i) for i in [0, n). Each index is processed exactly once by one
// thread; fn must write only to outputs owned by index i, which makes the
// result bitwise independent of the thread count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    unsigned workers = hardware_threads();
    if (n <= 1 || workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    if (static_cast<int>(workers) > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace ctsr
