#include "aot/parallel.hpp"

#include <atomic>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aot {

namespace {
std::atomic<int> g_max_threads{0}; // 0 = hardware default
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0); }

int max_threads() {
    int n = g_max_threads.load();
    if (n > 0) return n;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
#endif
}

namespace detail {
bool use_omp(Execution ex, std::size_t n) {
    if (ex != Execution::parallel || n < 2 || max_threads() < 2) return false;
#ifdef _OPENMP
    return omp_in_parallel() == 0; // no nested teams
#else
    return false;
#endif
}
} // namespace detail

} // namespace aot
