#pragma once

#include <cstddef>

namespace aot {

/// Execution mode for the data-parallel kernels. `serial` is the reference
/// path used by tests and the benchmark; `parallel` uses OpenMP when built
/// with it and falls back to the serial path otherwise. Both modes write
/// results by index, so outputs are bit-identical.
enum class Execution { serial, parallel };

/// Caps the worker thread count for all parallel kernels (CLI --threads).
void set_max_threads(int n);
int max_threads();

namespace detail {
bool use_omp(Execution ex, std::size_t n);
}

} // namespace aot

#ifdef _OPENMP
#include <omp.h>

template <class F>
void aot_parallel_for_impl(std::size_t n, aot::Execution ex, F&& f) {
    if (aot::detail::use_omp(ex, n)) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(aot::max_threads())
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            f(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}
#else
template <class F>
void aot_parallel_for_impl(std::size_t n, aot::Execution, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}
#endif

namespace aot {

/// Runs f(0), ..., f(n-1), possibly concurrently. Each index must touch
/// disjoint output slots; there is no reduction.
template <class F>
void parallel_for(std::size_t n, Execution ex, F&& f) {
    aot_parallel_for_impl(n, ex, static_cast<F&&>(f));
}

} // namespace aot
