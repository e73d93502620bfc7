#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace geomlaw {

// Runs fn(0..count-1) across worker threads.  Each index must write only its
// own slot of any shared output so results are independent of scheduling;
// callers aggregate in index order afterwards.  threads == 0 picks the
// hardware concurrency, threads == 1 stays on the calling thread.
inline void parallel_for_index(std::size_t count, unsigned threads,
                               const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (workers == 0) workers = 1;
    if (workers > count) workers = static_cast<unsigned>(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace geomlaw
