#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

// Worker-pool helpers.  Thread count comes from the LADDERFORGE_THREADS
// environment variable (unset, empty or 0 means one worker per hardware
// thread).  Every parallel loop here assigns work by index, so results are
// identical for any worker count.
namespace ladderforge {

inline unsigned worker_count() {
    if (const char* env = std::getenv("LADDERFORGE_THREADS")) {
        const std::string s(env);
        if (!s.empty()) {
            try {
                const unsigned long n = std::stoul(s);
                if (n > 0) return static_cast<unsigned>(n);
            } catch (const std::exception&) {
                // fall through to auto detection on junk values
            }
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

// Runs fn(i) for i in [0, n) across worker_count() threads.  Indices are
// handed out in contiguous chunks; the first exception thrown by any worker
// is rethrown on the calling thread after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ladderforge
