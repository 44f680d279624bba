#include "strato/modes.hpp"

#include <cmath>

#include "strato/csv.hpp"
#include "strato/tridiag.hpp"

namespace strato {

namespace {

void attach_weights(ModeSet& modes) {
    const std::size_t n = modes.grid.size;
    modes.wf.resize(n);
    modes.wg.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = modes.variant == Variant::Full ? modes.rho[i] : 1.0;
        modes.wf[i] = r * modes.n2[i];
        modes.wg[i] = r;
    }
}

// g_n = c_n * Df_n with second-order stencils, then renormalized to unit
// weighted norm: the centered difference scales each mode by a sinc-type
// factor and renormalizing removes it, which the round-trip identity needs.
void derive_g(ModeSet& modes) {
    const std::size_t nz = modes.grid.size;
    const double h = modes.grid.dz;
    modes.g.assign(modes.count + 1, std::vector<double>(nz, 0.0));

    std::vector<double> inv_rho(nz);
    for (std::size_t i = 0; i < nz; ++i)
        inv_rho[i] = 1.0 / (modes.variant == Variant::Full ? modes.rho[i] : 1.0);
    const double alpha = 1.0 / std::sqrt(trapezoid(inv_rho, h));
    modes.alpha0 = alpha;
    for (std::size_t i = 0; i < nz; ++i) modes.g[0][i] = alpha * inv_rho[i];

    for (std::size_t n = 1; n <= modes.count; ++n) {
        const auto& f = modes.f[n - 1];
        auto& g = modes.g[n];
        const double c = modes.speeds[n - 1];
        g[0] = c * (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for (std::size_t i = 1; i + 1 < nz; ++i) g[i] = c * (f[i + 1] - f[i - 1]) / (2.0 * h);
        g[nz - 1] = c * (3.0 * f[nz - 1] - 4.0 * f[nz - 2] + f[nz - 3]) / (2.0 * h);
        const double norm = std::sqrt(weighted_inner(g, g, modes.wg, h));
        for (double& value : g) value /= norm;
    }
}

}  // namespace

ModeSet solve_modes(const DensityProfile& profile, const BruntVaisala& stratification,
                    std::size_t m, Exec exec) {
    if (!profile.grid.same_as(stratification.grid))
        fail(ErrorCode::GridError, "profile and buoyancy data on different grids");
    const std::size_t nz = profile.grid.size;
    if (m < 1) fail(ErrorCode::InvalidParams, "mode count must be >= 1");
    if (m > nz / 4)
        fail(ErrorCode::ResolutionError, "mode count exceeds grid_size/4; refine the grid");

    const double h = profile.grid.dz;
    const std::size_t interior = nz - 2;
    GeneralizedTridiag problem;
    problem.a_diag.resize(interior);
    problem.a_off.resize(interior - 1);
    problem.b_diag.resize(interior);
    const bool full = profile.variant == Variant::Full;
    for (std::size_t j = 0; j < interior; ++j) {
        const std::size_t i = j + 1;
        const double rm = full ? 0.5 * (profile.rho[i - 1] + profile.rho[i]) : 1.0;
        const double rp = full ? 0.5 * (profile.rho[i] + profile.rho[i + 1]) : 1.0;
        problem.a_diag[j] = (rm + rp) / (h * h);
        if (j + 1 < interior) problem.a_off[j] = -rp / (h * h);
        problem.b_diag[j] = (full ? profile.rho[i] : 1.0) * stratification.n2[i];
    }

    auto pairs = smallest_eigenpairs(problem, m, exec);

    ModeSet modes;
    modes.variant = profile.variant;
    modes.grid = profile.grid;
    modes.gravity = profile.g;
    modes.count = m;
    modes.n2 = stratification.n2;
    modes.rho = profile.rho;
    modes.speeds.resize(m);
    modes.f.assign(m, std::vector<double>(nz, 0.0));
    const double sqrt_h = std::sqrt(h);
    double prev_lambda = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
        const double lambda = pairs[n].lambda;
        if (!(lambda > 0.0)) fail(ErrorCode::EigenFailure, "nonpositive eigenvalue");
        if (n > 0 && !(lambda > prev_lambda))
            fail(ErrorCode::EigenFailure, "eigenvalues not strictly increasing");
        prev_lambda = lambda;
        modes.speeds[n] = 1.0 / std::sqrt(lambda);
        // Interior values scaled so the trapezoid norm (weight rho*N^2) is 1:
        // endpoints vanish, so trapezoid == h * u^T B u exactly.
        const double sign = pairs[n].vector[0] >= 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < interior; ++j)
            modes.f[n][j + 1] = sign * pairs[n].vector[j] / sqrt_h;
    }
    attach_weights(modes);
    derive_g(modes);
    return modes;
}

ModeSet explicit_boussinesq_modes(double n_value, double depth, std::size_t grid_size,
                                  std::size_t m) {
    if (!(n_value > 0.0)) fail(ErrorCode::InvalidParams, "buoyancy frequency must be positive");
    if (m < 1) fail(ErrorCode::InvalidParams, "mode count must be >= 1");
    if (m > grid_size / 4)
        fail(ErrorCode::ResolutionError, "mode count exceeds grid_size/4; refine the grid");
    ModeSet modes;
    modes.variant = Variant::Boussinesq;
    modes.grid = VerticalGrid::uniform(depth, grid_size);
    modes.gravity = 1.0;
    modes.count = m;
    modes.n2.assign(grid_size, n_value * n_value);
    modes.rho.assign(grid_size, 1.0);
    modes.speeds.resize(m);
    modes.f.assign(m, std::vector<double>(grid_size, 0.0));
    modes.g.assign(m + 1, std::vector<double>(grid_size, 0.0));
    const double pi = std::acos(-1.0);
    const double amp_f = std::sqrt(2.0 / depth) / n_value;
    const double amp_g = std::sqrt(2.0 / depth);
    modes.alpha0 = 1.0 / std::sqrt(depth);
    for (std::size_t i = 0; i < grid_size; ++i) modes.g[0][i] = modes.alpha0;
    for (std::size_t n = 1; n <= m; ++n) {
        modes.speeds[n - 1] = n_value * depth / (static_cast<double>(n) * pi);
        for (std::size_t i = 0; i < grid_size; ++i) {
            const double phase =
                static_cast<double>(n) * pi * (modes.grid.z[i] + depth) / depth;
            modes.f[n - 1][i] = amp_f * std::sin(phase);
            modes.g[n][i] = amp_g * std::cos(phase);
        }
        modes.f[n - 1].front() = 0.0;
        modes.f[n - 1].back() = 0.0;
    }
    attach_weights(modes);
    return modes;
}

std::vector<std::vector<double>> orthonormality_residual(const ModeSet& modes, Basis which,
                                                         Exec exec) {
    const std::size_t nz = modes.grid.size;
    std::vector<const std::vector<double>*> family;
    std::vector<double> weight(nz);
    std::vector<std::vector<double>> dual_store;
    switch (which) {
        case Basis::FBasis:
            for (const auto& f : modes.f) family.push_back(&f);
            weight = modes.wf;
            break;
        case Basis::GBasis:
            for (const auto& g : modes.g) family.push_back(&g);
            weight = modes.wg;
            break;
        case Basis::WeightedDual:
            dual_store.reserve(modes.count);
            for (const auto& f : modes.f) {
                std::vector<double> d(nz);
                for (std::size_t i = 0; i < nz; ++i) d[i] = modes.wf[i] * f[i];
                dual_store.push_back(std::move(d));
            }
            for (const auto& d : dual_store) family.push_back(&d);
            for (std::size_t i = 0; i < nz; ++i) weight[i] = 1.0 / modes.wf[i];
            break;
    }
    const std::size_t count = family.size();
    std::vector<std::vector<double>> residual(count, std::vector<double>(count, 0.0));
    parallel_for(count, exec, [&](std::size_t row) {
        for (std::size_t col = 0; col < count; ++col) {
            const double gram =
                weighted_inner(*family[row], *family[col], weight, modes.grid.dz);
            residual[row][col] = gram - (row == col ? 1.0 : 0.0);
        }
    });
    return residual;
}

double max_abs(const std::vector<std::vector<double>>& matrix) {
    double result = 0.0;
    for (const auto& row : matrix)
        for (double value : row) result = std::max(result, std::abs(value));
    return result;
}

double max_abs_offdiag(const std::vector<std::vector<double>>& matrix) {
    double result = 0.0;
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = 0; j < matrix[i].size(); ++j)
            if (i != j) result = std::max(result, std::abs(matrix[i][j]));
    return result;
}

void write_speeds_csv(const ModeSet& modes, const std::string& path) {
    CsvWriter writer({"n", "c_n"});
    for (std::size_t n = 1; n <= modes.count; ++n)
        writer.add_row({static_cast<double>(n), modes.speeds[n - 1]});
    writer.write(path);
}

void write_modes_csv(const ModeSet& modes, const std::string& path) {
    std::vector<std::string> header{"z"};
    for (std::size_t n = 1; n <= modes.count; ++n) header.push_back("f_" + std::to_string(n));
    for (std::size_t n = 0; n <= modes.count; ++n) header.push_back("g_" + std::to_string(n));
    CsvWriter writer(header);
    for (std::size_t i = 0; i < modes.grid.size; ++i) {
        std::vector<double> row{modes.grid.z[i]};
        for (std::size_t n = 1; n <= modes.count; ++n) row.push_back(modes.f[n - 1][i]);
        for (std::size_t n = 0; n <= modes.count; ++n) row.push_back(modes.g[n][i]);
        writer.add_row(row);
    }
    writer.write(path);
}

}  // namespace strato
