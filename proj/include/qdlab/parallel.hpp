#pragma once

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qdlab::par {

// Global switch between the OpenMP kernels and their serial twins.
// Kernels store per-index results and reduce in index order, so the two
// paths execute the same floating-point additions in the same order and
// agree bitwise for any thread count.
inline std::atomic<bool>& detail_flag() {
    static std::atomic<bool> f{true};
    return f;
}

inline bool enabled() { return detail_flag().load(std::memory_order_relaxed); }
inline void set_enabled(bool on) { detail_flag().store(on, std::memory_order_relaxed); }

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace qdlab::par
