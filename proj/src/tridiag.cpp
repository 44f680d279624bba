#include "strato/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strato/errors.hpp"

namespace strato {

namespace {

struct Standardized {
    std::vector<double> d;    // diagonal
    std::vector<double> e;    // off-diagonal, size n-1
    std::vector<double> e2;   // squared off-diagonal
    double pivmin = 0.0;
    double norm = 0.0;        // infinity-norm bound
};

Standardized standardize(const GeneralizedTridiag& p) {
    const std::size_t n = p.a_diag.size();
    if (n < 2 || p.a_off.size() != n - 1 || p.b_diag.size() != n)
        fail(ErrorCode::GridError, "inconsistent tridiagonal problem sizes");
    Standardized s;
    s.d.resize(n);
    s.e.resize(n - 1);
    s.e2.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p.b_diag[i] > 0.0))
            fail(ErrorCode::EigenFailure, "weight matrix must be positive definite");
        s.d[i] = p.a_diag[i] / p.b_diag[i];
    }
    double max_e2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        s.e[i] = p.a_off[i] / std::sqrt(p.b_diag[i] * p.b_diag[i + 1]);
        s.e2[i] = s.e[i] * s.e[i];
        max_e2 = std::max(max_e2, s.e2[i]);
    }
    s.pivmin = 1e-280 * std::max(1.0, max_e2);
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(s.d[i]);
        if (i > 0) r += std::abs(s.e[i - 1]);
        if (i + 1 < n) r += std::abs(s.e[i]);
        s.norm = std::max(s.norm, r);
    }
    return s;
}

// Number of eigenvalues of the standardized matrix strictly below x.
std::size_t sturm_count(const Standardized& s, double x) {
    const std::size_t n = s.d.size();
    std::size_t count = 0;
    double q = s.d[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(q) < s.pivmin) q = (q < 0.0) ? -s.pivmin : s.pivmin;
        q = (s.d[i] - x) - s.e2[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

// j-th smallest eigenvalue (1-based) by bisection.
double bisect_eigenvalue(const Standardized& s, std::size_t j) {
    double lo = -s.norm, hi = s.norm;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(s, mid) >= j)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= eps * (std::abs(lo) + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// Solves (T - sigma) y = b for tridiagonal T by elimination with partial
// pivoting; factorization kept so several right-hand sides are cheap.
struct ShiftedSolver {
    std::vector<double> u, v, w;  // diagonal, first and second superdiagonal
    std::vector<double> mult;     // row multipliers
    std::vector<char> swapped;

    ShiftedSolver(const Standardized& s, double sigma) {
        const std::size_t n = s.d.size();
        u.assign(n, 0.0);
        v.assign(n, 0.0);
        w.assign(n, 0.0);
        mult.assign(n, 0.0);
        swapped.assign(n, 0);
        // Row i of T - sigma: [e_{i-1}, d_i - sigma, e_i]
        std::vector<double> lower(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = s.d[i] - sigma;
            if (i + 1 < n) {
                v[i] = s.e[i];
                lower[i + 1] = s.e[i];
            }
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(lower[i + 1]) > std::abs(u[i])) {
                std::swap(u[i], lower[i + 1]);
                std::swap(v[i], u[i + 1]);
                w[i] = v[i + 1];
                v[i + 1] = 0.0;
                swapped[i] = 1;
            }
            if (u[i] == 0.0) u[i] = s.pivmin;
            const double m = lower[i + 1] / u[i];
            mult[i] = m;
            u[i + 1] -= m * v[i];
            v[i + 1] -= m * w[i];
        }
        const std::size_t last = n - 1;
        if (u[last] == 0.0) u[last] = s.pivmin;
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = u.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (swapped[i]) std::swap(b[i], b[i + 1]);
            b[i + 1] -= mult[i] * b[i];
        }
        for (std::size_t i = n; i-- > 0;) {
            double acc = b[i];
            if (i + 1 < n) acc -= v[i] * b[i + 1];
            if (i + 2 < n) acc -= w[i] * b[i + 2];
            b[i] = acc / u[i];
        }
    }
};

double norm2(const std::vector<double>& x) {
    double s = 0.0;
    for (double value : x) s += value * value;
    return std::sqrt(s);
}

// Residual || T y - lambda y || for the standardized matrix, y unit norm.
double residual(const Standardized& s, const std::vector<double>& y, double lambda) {
    const std::size_t n = y.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (s.d[i] - lambda) * y[i];
        if (i > 0) r += s.e[i - 1] * y[i - 1];
        if (i + 1 < n) r += s.e[i] * y[i + 1];
        acc += r * r;
    }
    return std::sqrt(acc);
}

void deflate(std::vector<double>& y, const std::vector<const std::vector<double>*>& against) {
    for (const auto* v : against) {
        double dot = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) dot += y[i] * (*v)[i];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= dot * (*v)[i];
    }
}

std::vector<double> inverse_iterate(const Standardized& s, double lambda,
                                    const std::vector<const std::vector<double>*>& against) {
    const std::size_t n = s.d.size();
    const double eps = std::numeric_limits<double>::epsilon();
    // Shift nudged off the eigenvalue so the factorization stays usable.
    double sigma = lambda + 16.0 * eps * s.norm;
    std::vector<double> y(n, 1.0 / std::sqrt(static_cast<double>(n)));
    deflate(y, against);
    for (int attempt = 0; attempt < 4; ++attempt) {
        ShiftedSolver solver(s, sigma);
        for (int it = 0; it < 3 + 2 * attempt; ++it) {
            solver.solve(y);
            deflate(y, against);
            const double norm = norm2(y);
            if (!(norm > 0.0) || !std::isfinite(norm)) break;
            for (double& value : y) value /= norm;
        }
        if (norm2(y) > 0.5 && residual(s, y, lambda) <= 1e-10 * std::max(1.0, s.norm)) return y;
        // Retry with a different nudge and a fresh start vector whose phase
        // pattern depends on the attempt, to escape symmetric degeneracies.
        sigma = lambda + 16.0 * eps * s.norm * static_cast<double>(attempt + 2);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = std::sin(static_cast<double>((attempt + 2) * (i + 1)) * 0.7548776662) /
                   std::sqrt(static_cast<double>(n));
        deflate(y, against);
    }
    fail(ErrorCode::EigenFailure, "inverse iteration did not converge");
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const GeneralizedTridiag& problem, std::size_t m,
                                           Exec exec) {
    const Standardized s = standardize(problem);
    const std::size_t n = s.d.size();
    if (m == 0 || m > n) fail(ErrorCode::InvalidParams, "requested eigenpair count out of range");

    std::vector<double> lambdas(m);
    parallel_for(m, exec, [&](std::size_t j) { lambdas[j] = bisect_eigenvalue(s, j + 1); });

    std::vector<std::vector<double>> vectors(m);
    bool thrown = false;
    std::string message;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (long long j = 0; j < static_cast<long long>(m); ++j) {
        try {
            vectors[static_cast<std::size_t>(j)] = inverse_iterate(s, lambdas[j], {});
        } catch (const Error& err) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                thrown = true;
                message = err.what();
            }
        }
    }
    if (thrown) fail(ErrorCode::EigenFailure, message);

    // Clustered eigenvalues get explicit re-orthogonalization (serial; the
    // Sturm-Liouville spectra here are simple so this is a safety net).
    const double cluster_tol = 1e-7 * std::max(1.0, s.norm);
    for (std::size_t j = 1; j < m; ++j) {
        if (lambdas[j] - lambdas[j - 1] < cluster_tol) {
            std::vector<const std::vector<double>*> against;
            for (std::size_t p = j; p-- > 0;) {
                if (lambdas[j] - lambdas[p] >= cluster_tol) break;
                against.push_back(&vectors[p]);
            }
            std::vector<double> y = vectors[j];
            deflate(y, against);
            const double norm = norm2(y);
            if (norm > 0.5) {
                for (double& value : y) value /= norm;
                vectors[j] = std::move(y);
            } else {
                // Same vector as an earlier cluster member: redo the inverse
                // iteration with the cluster deflated inside the loop.
                vectors[j] = inverse_iterate(s, lambdas[j], against);
            }
        }
    }

    std::vector<EigenPair> result(m);
    for (std::size_t j = 0; j < m; ++j) {
        result[j].lambda = lambdas[j];
        result[j].vector.resize(n);
        // Back-transform u = B^{-1/2} y; unit y gives u^T B u = 1 exactly.
        for (std::size_t i = 0; i < n; ++i)
            result[j].vector[i] = vectors[j][i] / std::sqrt(problem.b_diag[i]);
    }
    return result;
}

}  // namespace strato
