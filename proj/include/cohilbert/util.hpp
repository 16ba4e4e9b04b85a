// Small shared utilities: worker-pool parallel loop with deterministic
// work assignment (results land in pre-allocated slots, so the output is
// independent of scheduling).
#ifndef COHILBERT_UTIL_HPP
#define COHILBERT_UTIL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cohilbert {

inline int worker_count() {
    if (const char* env = std::getenv("COHILBERT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

// Runs fn(i) for i in [0, count); exceptions are rethrown on the caller.
inline void parallel_for(int count, const std::function<void(int)>& fn,
                         int threads = 0) {
    if (threads <= 0) threads = worker_count();
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace cohilbert

#endif  // COHILBERT_UTIL_HPP
