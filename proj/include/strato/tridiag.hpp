#pragma once

#include <cstddef>
#include <vector>

#include "strato/exec.hpp"

namespace strato {

// Generalized symmetric tridiagonal eigenproblem A u = lambda B u with B
// diagonal and positive definite. Reduced internally to a standard symmetric
// tridiagonal problem by the congruence B^{-1/2} A B^{-1/2}.
struct GeneralizedTridiag {
    std::vector<double> a_diag;  // size n
    std::vector<double> a_off;   // size n-1
    std::vector<double> b_diag;  // size n, all positive
};

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector;  // normalized so that u^T B u = 1
};

// The m algebraically smallest eigenpairs, ascending. Eigenvalues by bisection
// on the Sturm sequence, eigenvectors by shifted inverse iteration with a
// deterministic start; clustered pairs are re-orthogonalized. Throws
// Error(EigenFailure) if an eigenvector fails its residual check.
std::vector<EigenPair> smallest_eigenpairs(const GeneralizedTridiag& problem, std::size_t m,
                                           Exec exec = Exec::Parallel);

}  // namespace strato
