#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace standcount {

// Runs fn(i) for i in [0, n) on up to `width` worker threads. Callers
// write results into pre-sized slots indexed by i, so reduction order
// (and therefore output bytes) never depends on scheduling. The first
// exception thrown by any worker is rethrown here.
template <typename Fn>
void parallel_for(int n, int width, Fn&& fn) {
    if (n <= 0) return;
    width = std::min(width, n);
    if (width <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        int i;
        while ((i = next.fetch_add(1)) < n) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(width);
    for (int t = 0; t < width; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace standcount
