#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace osclab {

// Number of worker threads used by parallel_map; 0 means hardware concurrency.
int thread_count();
void set_thread_count(int n);

namespace detail {
// Set inside workers so nested parallel_map calls run serially.
inline thread_local bool in_worker = false;
}  // namespace detail

// Evaluates fn(i) for i in [0, n) and returns results in index order, so any
// reduction done afterwards is independent of the thread count.
template <class F>
auto parallel_map(std::size_t n, F fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(thread_count(), static_cast<int>(n))));
    if (workers <= 1 || detail::in_worker) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            detail::in_worker = true;
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace osclab
