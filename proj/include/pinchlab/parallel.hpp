#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pinchlab {

/// Worker count from PINCHLAB_THREADS, else the hardware concurrency.
inline unsigned worker_threads() {
    if (const char* env = std::getenv("PINCHLAB_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n) on a small pool; rethrows the first exception (lowest index).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace pinchlab
