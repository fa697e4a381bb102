#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace wbb {

inline unsigned resolve_workers(int workers) {
    if (workers > 0) return static_cast<unsigned>(workers);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Static block partition of [begin, end) over `workers` threads.  Each index
// is processed exactly once; bodies must write per-index slots only, so the
// result is independent of the worker count and of scheduling.  Batches
// below `min_batch` run inline: for cheap bodies the thread spawn costs more
// than the work and would pollute per-call timings.
template <typename F>
void parallel_for(int workers, std::uint64_t begin, std::uint64_t end, F&& body,
                  std::uint64_t min_batch = 512) {
    if (begin >= end) return;
    const std::uint64_t count = end - begin;
    unsigned nw = resolve_workers(workers);
    if (static_cast<std::uint64_t>(nw) > count) nw = static_cast<unsigned>(count);
    if (count < min_batch) nw = 1;
    if (nw <= 1) {
        for (std::uint64_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    std::vector<std::exception_ptr> errors(nw);
    const std::uint64_t chunk = count / nw;
    const std::uint64_t rem = count % nw;
    std::uint64_t lo = begin;
    for (unsigned w = 0; w < nw; ++w) {
        const std::uint64_t hi = lo + chunk + (w < rem ? 1 : 0);
        pool.emplace_back([&body, &errors, w, lo, hi] {
            try {
                for (std::uint64_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        lo = hi;
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace wbb
