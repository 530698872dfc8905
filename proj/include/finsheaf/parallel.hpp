#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace finsheaf {

/// Execution policy for the data-parallel kernels. `Serial` is the
/// reference path the parallel one is tested against.
enum class Exec { Serial, Parallel };

/// Runs fn(i) for i in [0, n). Under Exec::Parallel the loop is an OpenMP
/// parallel for; an exception thrown by any iteration is rethrown after the
/// loop, and when several iterations throw the one with the lowest index
/// wins so failures are reproducible.
template <class Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
    if (exec == Exec::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace finsheaf
