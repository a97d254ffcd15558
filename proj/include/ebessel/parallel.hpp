#pragma once

#include <vector>

namespace ebessel {

// Kernel dispatch mode. Parallel uses OpenMP over independent rows/indices;
// Serial runs the identical per-index code in a plain loop. Both modes (and
// any OpenMP thread count) produce bitwise-identical results because no
// reduction order ever depends on the schedule.
enum class ExecMode { Serial, Parallel };

ExecMode exec_mode();
void set_exec_mode(ExecMode m);

// Number of OpenMP threads the Parallel mode would use (1 without OpenMP).
int worker_count();
void set_worker_count(int n);

template <class F>
void for_each_index(int n, F&& f) {
    if (exec_mode() == ExecMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n; ++i) f(i);
    } else {
        for (int i = 0; i < n; ++i) f(i);
    }
}

// Deterministic reduction: per-index partials are computed in parallel and
// then summed serially in index order.
template <class F>
double sum_over_indices(int n, F&& f) {
    std::vector<double> partials(static_cast<size_t>(n));
    for_each_index(n, [&](int i) { partials[static_cast<size_t>(i)] = f(i); });
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += partials[static_cast<size_t>(i)];
    return s;
}

}  // namespace ebessel
