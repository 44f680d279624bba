#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "strato/errors.hpp"

namespace strato {

// Dense symmetric matrix, row-major, sized for modal systems (M <= a few dozen).
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Cholesky factorization A = L L^T; construction throws
// Error(MassMatrixDegenerate) when A is not positive definite.
class Cholesky {
public:
    explicit Cholesky(const SymMatrix& matrix);

    std::size_t size() const { return n_; }
    void solve_inplace(std::vector<double>& rhs) const;
    void solve_inplace(std::vector<std::complex<double>>& rhs) const;

private:
    std::size_t n_ = 0;
    std::vector<double> l_;  // lower triangle, row-major
};

// 2-norm condition estimate of an SPD matrix via power iteration on A and
// A^{-1} with a fixed start vector; good to a few percent, which is all the
// diagnostics need.
double spd_condition_estimate(const SymMatrix& matrix, const Cholesky& factor,
                              int iterations = 60);

}  // namespace strato
