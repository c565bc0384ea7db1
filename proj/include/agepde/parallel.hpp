// Deterministic parallel kernels. Reductions use fixed-size blocks so the
// result is bit-identical for any thread count; elementwise maps are
// trivially order-independent. Serial references are kept for testing and
// benchmarking against the OpenMP paths.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agepde {

inline constexpr std::size_t kReductionBlock = 4096;
// Below this size the OpenMP fork/join overhead dominates.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

inline double serial_sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

// Fixed-block pairwise sum: per-block partial sums (parallelizable), then
// a serial accumulation in block order. Block boundaries do not depend on
// the thread count, so the rounding pattern is reproducible.
inline double block_sum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n <= kReductionBlock) return serial_sum(x);
    const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
    double total = 0.0;
#ifdef _OPENMP
    if (n >= kParallelThreshold) {
        std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
        for (long long bi = 0; bi < static_cast<long long>(nblocks); ++bi) {
            const std::size_t lo = static_cast<std::size_t>(bi) * kReductionBlock;
            const std::size_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
            partial[static_cast<std::size_t>(bi)] = serial_sum(x.subspan(lo, hi - lo));
        }
        for (double p : partial) total += p;
        return total;
    }
#endif
    for (std::size_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t lo = bi * kReductionBlock;
        const std::size_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
        total += serial_sum(x.subspan(lo, hi - lo));
    }
    return total;
}

// Elementwise map over [0, n): f(i) must only write index i.
template <class F>
inline void for_each_index(std::size_t n, F&& f) {
#ifdef _OPENMP
    if (n >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            f(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
inline void for_each_index_serial(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace agepde
