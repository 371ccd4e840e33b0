#ifndef BOAC_PARALLEL_HPP
#define BOAC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "boac/types.hpp"

namespace boac
{

/// Number of workers to use for a request of `threads` (0 = hardware).
inline int resolve_threads(int threads)
{
    if (threads > 0) {
        return threads;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, n) on up to `threads` workers.
///
/// Work items are claimed from a shared counter; results must be written by
/// index so the outcome does not depend on scheduling. If any call throws,
/// the exception of the smallest failing index is rethrown after all
/// workers stop.
template <class Body>
void parallel_for(Index n, int threads, Body&& body)
{
    if (n <= 0) {
        return;
    }
    const int workers = static_cast<int>(std::min<Index>(resolve_threads(threads), n));
    if (workers <= 1) {
        for (Index i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<Index> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    Index first_failure = n;
    std::exception_ptr error;

    auto run = [&] {
        for (;;) {
            const Index i = next.fetch_add(1);
            if (i >= n || failed.load()) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (i < first_failure) {
                    first_failure = i;
                    error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) {
        pool.emplace_back(run);
    }
    run();
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace boac

#endif
