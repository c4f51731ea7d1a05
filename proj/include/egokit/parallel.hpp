#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace egokit {

// Execution policy for the data-parallel kernels. Every kernel has a serial
// reference path and an OpenMP path producing bit-identical results: parallel
// loops only fill per-element slots, reductions and RNG draws stay serial.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline int thread_id() {
#ifdef _OPENMP
    return omp_get_thread_num();
#else
    return 0;
#endif
}

inline double wall_time() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return 0.0;
#endif
}

}  // namespace egokit
