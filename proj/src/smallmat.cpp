#include "strato/smallmat.hpp"

#include <cmath>

namespace strato {

Cholesky::Cholesky(const SymMatrix& matrix) : n_(matrix.n), l_(matrix.n * matrix.n, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = matrix.at(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l_[i * n_ + k] * l_[j * n_ + k];
            if (i == j) {
                if (!(sum > 0.0) || !std::isfinite(sum))
                    fail(ErrorCode::MassMatrixDegenerate,
                         "matrix not positive definite at pivot " + std::to_string(i));
                l_[i * n_ + i] = std::sqrt(sum);
            } else {
                l_[i * n_ + j] = sum / l_[j * n_ + j];
            }
        }
    }
}

void Cholesky::solve_inplace(std::vector<double>& rhs) const {
    if (rhs.size() != n_) fail(ErrorCode::GridError, "right-hand side size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= l_[i * n_ + k] * rhs[k];
        rhs[i] = sum / l_[i * n_ + i];
    }
    for (std::size_t i = n_; i-- > 0;) {
        double sum = rhs[i];
        for (std::size_t k = i + 1; k < n_; ++k) sum -= l_[k * n_ + i] * rhs[k];
        rhs[i] = sum / l_[i * n_ + i];
    }
}

void Cholesky::solve_inplace(std::vector<std::complex<double>>& rhs) const {
    if (rhs.size() != n_) fail(ErrorCode::GridError, "right-hand side size mismatch");
    std::vector<double> re(n_), im(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        re[i] = rhs[i].real();
        im[i] = rhs[i].imag();
    }
    solve_inplace(re);
    solve_inplace(im);
    for (std::size_t i = 0; i < n_; ++i) rhs[i] = {re[i], im[i]};
}

double spd_condition_estimate(const SymMatrix& matrix, const Cholesky& factor,
                              int iterations) {
    const std::size_t n = matrix.n;
    std::vector<double> x(n, 1.0), y(n);
    auto normalize = [&](std::vector<double>& v) {
        double norm = 0.0;
        for (double value : v) norm += value * value;
        norm = std::sqrt(norm);
        for (double& value : v) value /= norm;
        return norm;
    };
    normalize(x);
    double lambda_max = 0.0;
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) sum += matrix.at(i, j) * x[j];
            y[i] = sum;
        }
        x = y;
        lambda_max = normalize(x);
    }
    std::vector<double> z(n, 1.0);
    normalize(z);
    double inv_lambda_max = 0.0;
    for (int it = 0; it < iterations; ++it) {
        factor.solve_inplace(z);
        inv_lambda_max = normalize(z);
    }
    return lambda_max * inv_lambda_max;
}

}  // namespace strato
