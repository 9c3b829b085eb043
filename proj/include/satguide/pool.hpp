#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace satguide {

// Default worker count: SATGUIDE_WORKERS env var, else hardware concurrency.
inline int default_worker_count() {
    if (const char* env = std::getenv("SATGUIDE_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? (int)hw : 1;
}

// Runs fn(i) for i in [0, count) on a bounded pool. Results must be written
// into slots keyed by i so aggregation is independent of scheduling order.
// The first exception thrown by any task is rethrown on the caller.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    int nthreads = (int)std::min<std::size_t>((std::size_t)workers, count);
    threads.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) threads.emplace_back(work);
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace satguide
