#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geosep {

namespace detail {
inline std::atomic<unsigned>& thread_limit_storage() {
    static std::atomic<unsigned> limit{std::max(1u, std::thread::hardware_concurrency())};
    return limit;
}
} // namespace detail

/// Caps the number of worker threads used inside library calls (minimum 1).
inline void set_thread_limit(unsigned n) { detail::thread_limit_storage() = std::max(1u, n); }
inline unsigned thread_limit() { return detail::thread_limit_storage(); }

/// Runs fn(i) for i in [0, count). Work items must write disjoint outputs;
/// the partition into threads never changes the result.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_limit(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace geosep
