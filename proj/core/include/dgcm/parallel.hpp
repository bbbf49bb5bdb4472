#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dgcm {

/// Runs fn(i) for i in [begin, end) on up to `threads` workers.
///
/// Work items must write only to their own output slots; results are then
/// independent of the scheduling, which keeps every Monte Carlo surface in
/// this library reproducible under any thread count. The first exception
/// thrown by a work item is rethrown on the calling thread.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& fn) {
    const int count = end - begin;
    if (count <= 0) return;
    if (threads < 1) threads = 1;
    const int workers = std::min(threads, count);
    if (workers == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }

    std::atomic<int> next{begin};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= end || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Default worker count for user-facing entry points.
inline int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace dgcm
