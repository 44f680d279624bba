#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace strato {

// Execution policy for the data-parallel kernels. Parallel loops assign
// disjoint output slices and keep every reduction serial, so Serial and
// Parallel produce bitwise-identical results; tests assert exact equality.
enum class Exec { Serial, Parallel };

template <typename Fn>
void parallel_for(std::size_t count, Exec exec, Fn&& fn) {
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            fn(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace strato
