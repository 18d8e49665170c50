#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gmtkit {

// Thread count used by the kernel loops. Resolution order: set_num_threads(),
// then GMTKIT_THREADS, then 1. Results never depend on the value: work is cut
// into fixed blocks and partial sums are combined on a fixed tree, so serial
// and parallel runs are bit-identical.
inline int& thread_count_ref() {
    static int n = [] {
        if (const char* env = std::getenv("GMTKIT_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        return 1;
    }();
    return n;
}

inline int num_threads() { return thread_count_ref(); }
inline void set_num_threads(int n) { thread_count_ref() = n > 0 ? n : 1; }

// Runs f(block_begin, block_end) over [0, n) in fixed-size blocks. Block
// boundaries do not depend on the number of workers.
template <class F>
void for_blocks(std::size_t n, std::size_t block, F&& f) {
    if (n == 0) return;
    const std::size_t nblocks = (n + block - 1) / block;
    const int workers = std::min<int>(num_threads(), static_cast<int>(nblocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b)
            f(b, b * block, std::min(n, (b + 1) * block));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) break;
            f(b, b * block, std::min(n, (b + 1) * block));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

// In-place pairwise tree reduction; the association order is a function of
// the vector length only.
inline double tree_sum(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::size_t len = v.size();
    while (len > 1) {
        const std::size_t half = (len + 1) / 2;
        for (std::size_t i = 0; i + half < len; ++i) v[i] += v[i + half];
        len = half;
    }
    return v[0];
}

constexpr std::size_t kSumBlock = 64;

// Deterministic sum of term(i) for i in [0, n): serial accumulation inside
// each 64-wide block, tree combination across blocks.
template <class Term>
double deterministic_sum(std::size_t n, Term&& term) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    std::vector<double> partial(nblocks, 0.0);
    for_blocks(n, kSumBlock, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        partial[b] = acc;
    });
    return tree_sum(partial);
}

}  // namespace gmtkit
