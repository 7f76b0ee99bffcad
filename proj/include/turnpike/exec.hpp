#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace turnpike {

/// Execution policy for the numeric kernels. Every parallel kernel has a
/// serial reference path; both produce bit-identical results (reductions are
/// combined in a fixed chunk order regardless of thread count).
enum class Exec { serial, parallel };

Exec default_exec();
void set_default_exec(Exec e);

/// Number of worker threads the parallel path would use (1 without OpenMP).
int hardware_workers();

template <class F>
inline void parallel_for(std::int64_t n, F&& body, Exec ex = default_exec()) {
#ifdef _OPENMP
    if (ex == Exec::parallel && n > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#else
    (void)ex;
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

/// Deterministic sum reduction: [0,n) is split into fixed-size chunks, chunk
/// partials are computed (possibly in parallel) and then combined serially in
/// chunk order. Both execution policies walk the identical chunk structure,
/// so the result is bit-identical regardless of policy or thread count.
template <class F>
inline double reduce_sum(std::int64_t n, F&& term, Exec ex = default_exec()) {
    constexpr std::int64_t chunk = 4096;
    if (n <= 0) return 0.0;
    const std::int64_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(static_cast<std::size_t>(nchunks));
    parallel_for(nchunks, [&](std::int64_t c) {
        const std::int64_t lo = c * chunk;
        const std::int64_t hi = lo + chunk < n ? lo + chunk : n;
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    }, ex);
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace turnpike
