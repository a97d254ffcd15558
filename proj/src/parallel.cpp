#include "ebessel/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ebessel {

namespace {
std::atomic<ExecMode> g_mode{ExecMode::Parallel};
}

ExecMode exec_mode() { return g_mode.load(std::memory_order_relaxed); }

void set_exec_mode(ExecMode m) { g_mode.store(m, std::memory_order_relaxed); }

int worker_count() {
#ifdef _OPENMP
    return exec_mode() == ExecMode::Parallel ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

void set_worker_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace ebessel
