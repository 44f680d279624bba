#include "strato/mixing.hpp"

#include <cmath>

#include "strato/csv.hpp"
#include "strato/grid.hpp"

namespace strato {

std::vector<double> alpha_matrix(const ModeSet& modes) {
    const std::size_t m = modes.count;
    std::vector<double> alpha(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double val = weighted_inner(modes.f[i], modes.f[j], modes.wg, modes.grid.dz);
            alpha[i * m + j] = val;
            alpha[j * m + i] = val;
        }
    return alpha;
}

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

void check_indices(std::size_t p, std::size_t q, std::size_t n) {
    if (p < 1 || q < 1 || n < 1)
        fail(ErrorCode::InvalidParams, "beta_gamma: mode indices are 1-based");
}

}  // namespace

InteractionTriple beta_gamma(std::size_t p, std::size_t q, std::size_t n) {
    check_indices(p, q, n);
    InteractionTriple t;
    t.p = p;
    t.q = q;
    t.n = n;
    // The sum and difference branches of the selection rule are exclusive for
    // n >= 1: p + q = n and |p - q| = n would force a zero index.
    if (p + q == n) {
        t.beta = kInvSqrt2;
        t.gamma = kInvSqrt2;
    } else if ((p > q ? p - q : q - p) == n) {
        t.beta = kInvSqrt2;
        t.gamma = -kInvSqrt2;
    }
    return t;
}

InteractionTriple beta_gamma_quadrature(std::size_t p, std::size_t q, std::size_t n,
                                        const ModeSet& modes) {
    check_indices(p, q, n);
    if (modes.variant != Variant::Boussinesq)
        fail(ErrorCode::InvalidParams,
             "beta_gamma_quadrature: coupling weights are defined for the Boussinesq "
             "constant-stratification basis");
    const std::size_t m = modes.count;
    if (p > m || q > m || n > m)
        fail(ErrorCode::InvalidParams, "beta_gamma_quadrature: index exceeds truncation");

    const std::size_t nz = modes.grid.size;
    std::vector<double> integrand(nz);
    InteractionTriple t;
    t.p = p;
    t.q = q;
    t.n = n;
    for (std::size_t i = 0; i < nz; ++i)
        integrand[i] = modes.g[p][i] * modes.g[q][i] * modes.g[n][i];
    t.beta = trapezoid(integrand, modes.grid.dz);
    for (std::size_t i = 0; i < nz; ++i)
        integrand[i] = -modes.n2[i] * modes.f[p - 1][i] * modes.f[q - 1][i] * modes.g[n][i];
    t.gamma = trapezoid(integrand, modes.grid.dz);
    return t;
}

InteractionTable build_interactions(std::size_t m) {
    if (m < 1) fail(ErrorCode::InvalidParams, "build_interactions: empty truncation");
    InteractionTable table;
    table.count = m;
    for (std::size_t p = 1; p <= m; ++p)
        for (std::size_t q = 1; q <= m; ++q) {
            const std::size_t sum = p + q;
            if (sum <= m)
                table.triples.push_back(beta_gamma(p, q, sum));
            else
                ++table.dropped;
            const std::size_t diff = p > q ? p - q : q - p;
            if (diff >= 1) table.triples.push_back(beta_gamma(p, q, diff));
        }
    return table;
}

SymMatrix coupled_mass_matrix(const std::vector<double>& alpha,
                              const std::vector<double>& speeds, double k) {
    const std::size_t m = speeds.size();
    if (m == 0 || alpha.size() != m * m)
        fail(ErrorCode::InvalidParams, "coupled_mass_matrix: alpha/speeds size mismatch");
    SymMatrix a(m);
    const double k2 = k * k;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            a.at(i, j) = (i == j ? 1.0 : 0.0) + k2 * speeds[i] * speeds[j] * alpha[i * m + j];
    Cholesky check(a);  // throws MassMatrixDegenerate when not SPD
    (void)check;
    return a;
}

void write_alpha_csv(const std::vector<double>& alpha, std::size_t m,
                     const std::string& path) {
    if (alpha.size() != m * m)
        fail(ErrorCode::InvalidParams, "write_alpha_csv: size mismatch");
    std::vector<std::string> header{"n"};
    for (std::size_t j = 1; j <= m; ++j) header.push_back("alpha_" + std::to_string(j));
    CsvWriter csv(header);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row{static_cast<double>(i + 1)};
        for (std::size_t j = 0; j < m; ++j) row.push_back(alpha[i * m + j]);
        csv.add_row(row);
    }
    csv.write(path);
}

}  // namespace strato
