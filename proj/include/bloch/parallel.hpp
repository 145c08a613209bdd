#pragma once
/// Deterministic fork-join helpers: work is split into contiguous index chunks and every result
/// is written to its own slot, so reductions done afterwards never depend on the worker count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bloch {

/// Calls fn(i) for every i in [0, n) using up to `threads` workers (threads <= 1 runs inline).
/// The first exception (lowest chunk) is rethrown after all workers joined.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    const std::size_t workers = std::min<std::size_t>(threads < 1 ? 1 : threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace bloch
