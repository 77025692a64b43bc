#pragma once

#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace shw::parallel {

// Runs fn(thread_index, i) for every i in [0, n), statically partitioned into
// contiguous blocks, one per thread. Callers write results into slots indexed
// by i, so the merged output is in input order no matter how many threads run.
template <class Fn>
void for_each_ordered(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const auto nt = static_cast<std::size_t>(threads < 1 ? 1 : threads);
    if (nt == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(0, i);
        return;
    }
    const std::size_t workers = std::min(nt, n);
    const std::size_t block = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        const std::size_t begin = t * block;
        const std::size_t end = std::min(begin + block, n);
        if (begin >= end) break;
        pool.emplace_back([t, begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(t, i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace shw::parallel
