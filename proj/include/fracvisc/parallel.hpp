#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fracvisc {

/// Runs fn(i) for i in [0, n) across at most `threads` workers with a static
/// block partition. Every index writes only to its own output slot, so the
/// result of a loop body is independent of the partitioning. The first
/// exception thrown by any worker is rethrown after all workers joined.
inline void parallel_for(long n, int threads,
                         const std::function<void(long)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    const long workers = std::min<long>(threads, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w) {
        const long begin = n * w / workers;
        const long end = n * (w + 1) / workers;
        pool.emplace_back([&, begin, end, w] {
            try {
                for (long i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fracvisc
