#pragma once
// Deterministic data-parallel helper: results are indexed by input
// position, so the merge order never depends on the worker count.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace simpleaug {

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned workers = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};
    constexpr std::size_t kChunk = 64;
    for (unsigned t = 0; t < workers; ++t) {
        threads.emplace_back([&]() {
            try {
                for (;;) {
                    std::size_t begin = next.fetch_add(kChunk);
                    if (begin >= n) break;
                    std::size_t end = std::min(n, begin + kChunk);
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& thread : threads) thread.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace simpleaug
