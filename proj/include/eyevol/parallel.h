// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_PARALLEL_H
#define EYEVOL_PARALLEL_H

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace eyevol {

// Chunked parallel for over [begin, end). Each index is processed exactly
// once; the body must write only to its own index's output so results do not
// depend on the thread count. The first exception thrown by any worker is
// rethrown on the calling thread.
inline void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t)>& body,
                         int num_threads = 0) {
    if (num_threads <= 0) num_threads = int(std::thread::hardware_concurrency());
    if (num_threads < 1) num_threads = 1;
    int64_t n = end - begin;
    if (n <= 0) return;
    if (num_threads == 1 || n == 1) {
        for (int64_t i = begin; i < end; i++) body(i);
        return;
    }
    int64_t chunk = std::max<int64_t>(1, n / (num_threads * 8));
    std::atomic<int64_t> next(begin);
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        try {
            for (;;) {
                int64_t lo = next.fetch_add(chunk);
                if (lo >= end) break;
                int64_t hi = std::min(end, lo + chunk);
                for (int64_t i = lo; i < hi; i++) body(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(num_threads - 1);
    for (int t = 1; t < num_threads; t++) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace eyevol

#endif
