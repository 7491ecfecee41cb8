#pragma once
// Minimal deterministic fan-out: results land in caller-owned slots, so the
// outcome is identical for any worker count.

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pusheval {

// Runs fn(i) for i in [0, n), striped over at most `jobs` threads.
// fn must only touch slot i of shared outputs. jobs <= 1 runs inline.
// The first exception thrown by any worker is rethrown after the join.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min(static_cast<std::size_t>(jobs), n);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace pusheval
