#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace suplab {

/// Worker cap: SUPLAB_THREADS if set, hardware concurrency otherwise.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SUPLAB_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

/// Static-partition parallel for. The body is called as body(i) for
/// i in [0, n). Bodies must write only to their own slots: results are
/// then independent of the thread count. The first exception thrown by any
/// worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(size_t n, Body&& body) {
    unsigned workers = static_cast<unsigned>(std::min<size_t>(worker_count(), n));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    size_t chunk = (n + workers - 1) / workers;
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto guarded = [&](size_t lo, size_t hi) {
        try {
            for (size_t i = lo; i < hi; ++i) {
                if (failed.load(std::memory_order_relaxed)) return;
                body(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back(guarded, lo, hi);
    }
    guarded(0, std::min(chunk, n));
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace suplab
