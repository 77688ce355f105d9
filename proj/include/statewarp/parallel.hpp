#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace statewarp {

/// Worker count: STATEWARP_THREADS if set to a positive integer, otherwise
/// the hardware concurrency. Re-read on every call so tests can adjust it.
inline std::size_t thread_budget()
{
    if (const char* env = std::getenv("STATEWARP_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n) across up to thread_budget() threads. Each index
/// is handled exactly once, so results equal the sequential run whenever the
/// body writes only to its own slot. The lowest-index exception wins.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    std::size_t workers = thread_budget();
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_index[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    std::exception_ptr first;
    std::size_t first_index = n;
    for (std::size_t w = 0; w < workers; ++w) {
        if (errors[w] && error_index[w] < first_index) {
            first = errors[w];
            first_index = error_index[w];
        }
    }
    if (first) std::rethrow_exception(first);
}

} // namespace statewarp
