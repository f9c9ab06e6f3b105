#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace vren {

// Runs fn(i) for i in [begin, end) split into contiguous blocks, one per
// worker. n_threads == 0 picks hardware concurrency. Results must not depend
// on the partitioning; callers write disjoint output ranges.
inline void parallel_for(int begin, int end, int n_threads,
                         const std::function<void(int)>& fn) {
    int count = end - begin;
    if (count <= 0)
        return;
    if (n_threads <= 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads <= 0)
            n_threads = 1;
    }
    n_threads = std::min(n_threads, count);
    if (n_threads == 1) {
        for (int i = begin; i < end; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    int chunk = (count + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
        int lo = begin + w * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo >= hi)
            break;
        workers.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto& t : workers)
        t.join();
}

}  // namespace vren
