#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace fsts {

/// Process-wide cap on worker threads used by the numerical kernels.
/// 0 means "use hardware concurrency". Results never depend on this
/// value: work is decomposed into fixed-size blocks and combined in
/// block order, so any worker count produces bit-identical output.
inline std::atomic<unsigned>& max_workers_knob() {
    static std::atomic<unsigned> value{0};
    return value;
}

inline void set_max_workers(unsigned n) { max_workers_knob().store(n); }

inline unsigned effective_workers() {
    unsigned n = max_workers_knob().load();
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
    }
    return n;
}

namespace detail {

/// Compensated (Kahan) accumulator.
struct kahan_sum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

/// Runs fn(block_index, begin, end) for every fixed-size block of [0, total).
/// Blocks are claimed dynamically but the decomposition itself is a pure
/// function of (total, block_size), never of the worker count.
template <class Fn>
void for_each_block(std::size_t total, std::size_t block_size, Fn&& fn) {
    if (total == 0) return;
    const std::size_t nblocks = (total + block_size - 1) / block_size;
    const unsigned workers_wanted = effective_workers();
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(workers_wanted, nblocks));

    auto run_block = [&](std::size_t b) {
        const std::size_t begin = b * block_size;
        const std::size_t end = std::min(begin + block_size, total);
        fn(b, begin, end);
    };

    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t b = next.fetch_add(1);
                if (b >= nblocks) break;
                run_block(b);
            }
        });
    }
    for (auto& t : pool) t.join();
}

/// Sums fn(begin, end) over fixed blocks of [0, total); partial sums are
/// reduced in block order with compensation, so the result is independent
/// of how blocks were scheduled across threads.
template <class Fn>
double blocked_sum(std::size_t total, std::size_t block_size, Fn&& fn) {
    if (total == 0) return 0.0;
    const std::size_t nblocks = (total + block_size - 1) / block_size;
    std::vector<double> partial(nblocks, 0.0);
    for_each_block(total, block_size, [&](std::size_t b, std::size_t begin, std::size_t end) {
        partial[b] = fn(begin, end);
    });
    kahan_sum acc;
    for (double p : partial) acc.add(p);
    return acc.value();
}

} // namespace detail
} // namespace fsts
