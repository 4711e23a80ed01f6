// parallel.hpp — deterministic trial-level parallelism.
//
// Workers take static contiguous chunks and write into preallocated slots, so
// results are independent of scheduling.
#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace lpt::parallel {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    jobs = std::min(jobs, count);
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        const std::size_t begin = count * w / jobs;
        const std::size_t end = count * (w + 1) / jobs;
        workers.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace lpt::parallel
