#include "strato/transform.hpp"

#include <algorithm>
#include <cmath>

#include "strato/fourier.hpp"
#include "strato/smallmat.hpp"

namespace strato {

namespace {

void check_field(const Field2D& field, const ModeSet& modes, const char* what) {
    if (field.nz != modes.grid.size)
        fail(ErrorCode::GridError, std::string(what) + ": field has " +
                                       std::to_string(field.nz) + " vertical samples, modes have " +
                                       std::to_string(modes.grid.size));
    if (field.nx == 0) fail(ErrorCode::GridError, std::string(what) + ": empty horizontal grid");
    if (!(field.length > 0.0))
        fail(ErrorCode::GridError, std::string(what) + ": nonpositive horizontal period");
}

// Trapezoid weight per sample (dz, halved at the two ends).
std::vector<double> quadrature_weights(const VerticalGrid& grid) {
    std::vector<double> w(grid.size, grid.dz);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

// coefficient row r_j = sum_i wq_i * weight_i * family_r(i) * field(i, j)
void pairings(const Field2D& field, const std::vector<std::vector<double>>& family,
              const std::vector<double>& weight, const std::vector<double>& wq,
              ModalField& out, Exec exec) {
    const std::size_t nx = field.nx;
    parallel_for(out.rows, exec, [&](std::size_t r) {
        double* dst = out.row(r);
        std::fill(dst, dst + nx, 0.0);
        const std::vector<double>& basis = family[r];
        for (std::size_t i = 0; i < field.nz; ++i) {
            const double c = wq[i] * weight[i] * basis[i];
            if (c == 0.0) continue;
            const double* src = field.row(i);
            for (std::size_t j = 0; j < nx; ++j) dst[j] += c * src[j];
        }
    });
}

// Gram matrix of the g-family under the weight it is orthonormal for. The
// derived family is orthonormal only to discretization accuracy, so g-side
// projections solve this system instead of trusting plain pairings.
Cholesky g_gram_factor(const ModeSet& modes) {
    const std::size_t m1 = modes.count + 1;
    SymMatrix gram(m1);
    for (std::size_t r = 0; r < m1; ++r)
        for (std::size_t s = 0; s <= r; ++s) {
            const double val =
                weighted_inner(modes.g[r], modes.g[s], modes.wg, modes.grid.dz);
            gram.at(r, s) = val;
            gram.at(s, r) = val;
        }
    return Cholesky(gram);
}

void gram_solve_columns(ModalField& coeffs, const Cholesky& factor, Exec exec) {
    const std::size_t rows = coeffs.rows;
    parallel_for(coeffs.nx, exec, [&](std::size_t j) {
        std::vector<double> col(rows);
        for (std::size_t r = 0; r < rows; ++r) col[r] = coeffs.at(r, j);
        factor.solve_inplace(col);
        for (std::size_t r = 0; r < rows; ++r) coeffs.at(r, j) = col[r];
    });
}

// field(i, j) = sum_r coef_r(j) * weight_i * family_r(i)
Field2D synthesize(const ModalField& coeffs, const ModeSet& modes,
                   const std::vector<std::vector<double>>& family,
                   const std::vector<double>& weight, Exec exec) {
    Field2D out(modes.grid.size, coeffs.nx, coeffs.length);
    parallel_for(out.nz, exec, [&](std::size_t i) {
        double* dst = out.row(i);
        for (std::size_t r = 0; r < coeffs.rows; ++r) {
            const double c = weight[i] * family[r][i];
            if (c == 0.0) continue;
            const double* src = coeffs.row(r);
            for (std::size_t j = 0; j < coeffs.nx; ++j) dst[j] += c * src[j];
        }
    });
    return out;
}

std::vector<double> unit_weight(const ModeSet& modes) {
    return std::vector<double>(modes.grid.size, 1.0);
}

void scale(ModalField& coeffs, double factor) {
    for (double& v : coeffs.data) v *= factor;
}

void check_rows(const ModalField& coeffs, std::size_t expect, const char* what) {
    if (coeffs.rows != expect)
        fail(ErrorCode::InvalidParams, std::string(what) + ": expected " +
                                           std::to_string(expect) + " coefficient rows, got " +
                                           std::to_string(coeffs.rows));
    if (coeffs.nx == 0 || !(coeffs.length > 0.0))
        fail(ErrorCode::InvalidParams, std::string(what) + ": empty horizontal grid");
}

}  // namespace

ModalField project(const Field2D& field, const ModeSet& modes, Basis basis, Exec exec) {
    check_field(field, modes, "project");
    const std::vector<double> wq = quadrature_weights(modes.grid);
    switch (basis) {
        case Basis::FBasis: {
            ModalField out(modes.count, field.nx, field.length);
            pairings(field, modes.f, modes.wf, wq, out, exec);
            return out;
        }
        case Basis::WeightedDual: {
            // dual functions are wf*f_n and the pairing weight is 1/wf, so the
            // quadrature collapses to a plain integral against f_n.
            ModalField out(modes.count, field.nx, field.length);
            pairings(field, modes.f, unit_weight(modes), wq, out, exec);
            return out;
        }
        case Basis::GBasis: {
            ModalField out(modes.count + 1, field.nx, field.length);
            pairings(field, modes.g, modes.wg, wq, out, exec);
            gram_solve_columns(out, g_gram_factor(modes), exec);
            return out;
        }
    }
    fail(ErrorCode::InvalidParams, "project: unknown basis");
}

Field2D reconstruct_field(const ModalField& coeffs, const ModeSet& modes, Basis basis,
                          Exec exec) {
    switch (basis) {
        case Basis::FBasis:
            check_rows(coeffs, modes.count, "reconstruct_field(f)");
            return synthesize(coeffs, modes, modes.f, unit_weight(modes), exec);
        case Basis::WeightedDual:
            check_rows(coeffs, modes.count, "reconstruct_field(dual)");
            return synthesize(coeffs, modes, modes.f, modes.wf, exec);
        case Basis::GBasis:
            check_rows(coeffs, modes.count + 1, "reconstruct_field(g)");
            return synthesize(coeffs, modes, modes.g, unit_weight(modes), exec);
    }
    fail(ErrorCode::InvalidParams, "reconstruct_field: unknown basis");
}

ModalCoefficients decompose(const PhysicalFields& fields, const ModeSet& modes, Exec exec) {
    check_field(fields.v, modes, "decompose(v)");
    check_field(fields.w, modes, "decompose(w)");
    check_field(fields.rho, modes, "decompose(rho)");
    check_field(fields.p, modes, "decompose(p)");

    ModalCoefficients out;
    out.count = modes.count;
    out.nx = fields.v.nx;
    out.length = fields.v.length;

    out.v = project(fields.v, modes, Basis::GBasis, exec);
    out.w = project(fields.w, modes, Basis::FBasis, exec);

    out.rho = project(fields.rho, modes, Basis::WeightedDual, exec);
    if (modes.variant == Variant::Full) scale(out.rho, modes.gravity);

    // P expands over rho_eq * g_n; pairing with unit weight then solving the
    // same g-family Gram recovers the coefficients for both variants.
    const std::vector<double> wq = quadrature_weights(modes.grid);
    out.p = ModalField(modes.count + 1, fields.p.nx, fields.p.length);
    pairings(fields.p, modes.g, unit_weight(modes), wq, out.p, exec);
    gram_solve_columns(out.p, g_gram_factor(modes), exec);
    return out;
}

PhysicalFields reconstruct(const ModalCoefficients& coeffs, const ModeSet& modes, Exec exec) {
    check_rows(coeffs.v, modes.count + 1, "reconstruct(v)");
    check_rows(coeffs.w, modes.count, "reconstruct(w)");
    check_rows(coeffs.rho, modes.count, "reconstruct(rho)");
    check_rows(coeffs.p, modes.count + 1, "reconstruct(p)");

    PhysicalFields out;
    out.v = reconstruct_field(coeffs.v, modes, Basis::GBasis, exec);
    out.w = reconstruct_field(coeffs.w, modes, Basis::FBasis, exec);

    out.rho = reconstruct_field(coeffs.rho, modes, Basis::WeightedDual, exec);
    if (modes.variant == Variant::Full) {
        const double inv_g = 1.0 / modes.gravity;
        for (double& v : out.rho.data) v *= inv_g;
    }

    out.p = synthesize(coeffs.p, modes, modes.g, modes.wg, exec);
    return out;
}

ModalField vertical_derivative_coeffs(const ModalField& coeffs, const ModeSet& modes,
                                      DerivativeTarget which) {
    if (which == DerivativeTarget::W) {
        check_rows(coeffs, modes.count, "vertical_derivative_coeffs(w)");
        ModalField out(modes.count + 1, coeffs.nx, coeffs.length);
        for (std::size_t r = 0; r < modes.count; ++r) {
            const double inv_c = 1.0 / modes.speeds[r];
            const double* src = coeffs.row(r);
            double* dst = out.row(r + 1);
            for (std::size_t j = 0; j < coeffs.nx; ++j) dst[j] = inv_c * src[j];
        }
        return out;
    }
    check_rows(coeffs, modes.count + 1, "vertical_derivative_coeffs(p)");
    ModalField out(modes.count, coeffs.nx, coeffs.length);
    for (std::size_t r = 0; r < modes.count; ++r) {
        const double factor = -1.0 / modes.speeds[r];
        const double* src = coeffs.row(r + 1);
        double* dst = out.row(r);
        for (std::size_t j = 0; j < coeffs.nx; ++j) dst[j] = factor * src[j];
    }
    return out;
}

namespace {

// Second-order first derivative: centered inside, one-sided at the two ends.
void deriv(const VerticalGrid& grid, const double* u, double* out) {
    const std::size_t n = grid.size;
    const double a = 1.0 / (2.0 * grid.dz);
    out[0] = a * (-3.0 * u[0] + 4.0 * u[1] - u[2]);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = a * (u[i + 1] - u[i - 1]);
    out[n - 1] = a * (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]);
}

// Transpose of the matrix applied by deriv() in the plain inner product.
void deriv_transpose(const VerticalGrid& grid, const double* u, double* out) {
    const std::size_t n = grid.size;
    const double a = 1.0 / (2.0 * grid.dz);
    std::fill(out, out + n, 0.0);
    out[0] += -3.0 * a * u[0];
    out[1] += 4.0 * a * u[0];
    out[2] += -a * u[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i - 1] -= a * u[i];
        out[i + 1] += a * u[i];
    }
    out[n - 1] += 3.0 * a * u[n - 1];
    out[n - 2] += -4.0 * a * u[n - 1];
    out[n - 3] += a * u[n - 1];
}

std::vector<double> pointwise(const std::vector<double>& w, const std::vector<double>& u) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = w[i] * u[i];
    return out;
}

void check_column(const VerticalOperatorPair& ops, const std::vector<double>& u,
                  const char* what) {
    if (u.size() != ops.grid.size)
        fail(ErrorCode::GridError, std::string(what) + ": column size mismatch");
}

}  // namespace

std::vector<double> VerticalOperatorPair::t1(const std::vector<double>& u) const {
    check_column(*this, u, "t1");
    std::vector<double> tmp = pointwise(mass, u), d1(u.size()), out(u.size());
    deriv(grid, tmp.data(), d1.data());
    tmp = pointwise(inv_slope, d1);
    deriv(grid, tmp.data(), out.data());
    return out;
}

std::vector<double> VerticalOperatorPair::t2(const std::vector<double>& u) const {
    check_column(*this, u, "t2");
    std::vector<double> tmp = pointwise(inv_slope, u), d1(u.size()), out(u.size());
    deriv(grid, tmp.data(), d1.data());
    tmp = pointwise(mass, d1);
    deriv(grid, tmp.data(), out.data());
    return out;
}

std::vector<double> VerticalOperatorPair::t1_adjoint(const std::vector<double>& u) const {
    check_column(*this, u, "t1_adjoint");
    std::vector<double> d1(u.size()), tmp(u.size());
    deriv_transpose(grid, u.data(), d1.data());
    tmp = pointwise(inv_slope, d1);
    deriv_transpose(grid, tmp.data(), d1.data());
    return pointwise(mass, d1);
}

std::vector<double> VerticalOperatorPair::t2_adjoint(const std::vector<double>& u) const {
    check_column(*this, u, "t2_adjoint");
    std::vector<double> d1(u.size()), tmp(u.size());
    deriv_transpose(grid, u.data(), d1.data());
    tmp = pointwise(mass, d1);
    deriv_transpose(grid, tmp.data(), d1.data());
    return pointwise(inv_slope, d1);
}

std::vector<double> VerticalOperatorPair::t3(const std::vector<double>& u) const {
    check_column(*this, u, "t3");
    std::vector<double> d1(u.size()), out(u.size());
    deriv(grid, u.data(), d1.data());
    std::vector<double> tmp = pointwise(mass, d1);
    deriv(grid, tmp.data(), out.data());
    return pointwise(inv_slope, out);
}

VerticalOperatorPair build_vertical_operators(const DensityProfile& profile,
                                              const BruntVaisala& stratification,
                                              double floor_rel) {
    if (!profile.grid.same_as(stratification.grid))
        fail(ErrorCode::GridError, "build_vertical_operators: profile/stratification grids differ");
    const std::size_t n = profile.grid.size;

    // -d rho/dz is rho N^2 / g identically (N^2 / g with unit density in the
    // Boussinesq reduction), which keeps the slope consistent with the
    // stratification actually used by the eigensolver.
    std::vector<double> slope(n);
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = profile.variant == Variant::Full ? profile.rho[i] : 1.0;
        slope[i] = rho * stratification.n2[i] / profile.g;
        top = std::max(top, slope[i]);
    }
    if (!(top > 0.0))
        fail(ErrorCode::OperatorSingular, "build_vertical_operators: flat density profile");
    for (std::size_t i = 0; i < n; ++i)
        if (!(slope[i] > floor_rel * top))
            fail(ErrorCode::OperatorSingular,
                 "build_vertical_operators: density slope degenerates at z = " +
                     std::to_string(profile.grid.z[i]));

    VerticalOperatorPair ops;
    ops.grid = profile.grid;
    ops.mass.assign(n, 1.0);
    if (profile.variant == Variant::Full) ops.mass = profile.rho;
    ops.inv_slope.resize(n);
    for (std::size_t i = 0; i < n; ++i) ops.inv_slope[i] = 1.0 / slope[i];
    return ops;
}

namespace {

// Quadratic extrapolation to the boundary from three consecutive samples
// starting at row offset s. Each derivative layer inside the iterated
// operators widens the band of boundary rows dominated by one-sided stencil
// error, so s grows with the application count l.
std::size_t trace_offset(std::size_t l) { return l == 0 ? 1 : 2 * l + 2; }

double bottom_trace(const std::vector<double>& u, std::size_t s) {
    const double a = 0.5 * static_cast<double>((s + 1) * (s + 2));
    const double b = -static_cast<double>(s * (s + 2));
    const double c = 0.5 * static_cast<double>(s * (s + 1));
    return a * u[s] + b * u[s + 1] + c * u[s + 2];
}

double top_trace(const std::vector<double>& u, std::size_t s) {
    const std::size_t n = u.size();
    const double a = 0.5 * static_cast<double>((s + 1) * (s + 2));
    const double b = -static_cast<double>(s * (s + 2));
    const double c = 0.5 * static_cast<double>(s * (s + 1));
    return a * u[n - 1 - s] + b * u[n - 2 - s] + c * u[n - 3 - s];
}

std::vector<double> column_of(const Field2D& field, std::size_t j) {
    std::vector<double> col(field.nz);
    for (std::size_t i = 0; i < field.nz; ++i) col[i] = field.at(i, j);
    return col;
}

}  // namespace

std::vector<CompatibilityRow> compatibility_check(const Field2D& v0, const Field2D& w0,
                                                  const Field2D& rho0,
                                                  const VerticalOperatorPair& ops,
                                                  std::size_t k) {
    if (k < 1) fail(ErrorCode::InvalidParams, "compatibility_check: order must be >= 1");
    const std::size_t n = ops.grid.size;
    if (n < 4 * k + 9)
        fail(ErrorCode::GridError, "compatibility_check: grid too small for requested order");
    for (const Field2D* f : {&v0, &w0, &rho0})
        if (f->nz != n) fail(ErrorCode::GridError, "compatibility_check: field grid mismatch");

    std::vector<CompatibilityRow> rows(k + 1);
    for (std::size_t l = 0; l <= k; ++l) rows[l].order = l;

    std::vector<double> d(n);
    for (std::size_t j = 0; j < w0.nx; ++j) {
        std::vector<double> cur = column_of(w0, j);
        rows[0].w_bottom = std::max(rows[0].w_bottom, std::abs(bottom_trace(cur, 1)));
        rows[0].w_top = std::max(rows[0].w_top, std::abs(top_trace(cur, 1)));
        for (std::size_t l = 1; l <= k; ++l) {
            cur = ops.t3(cur);
            const std::size_t s = trace_offset(l);
            rows[l].w_bottom = std::max(rows[l].w_bottom, std::abs(bottom_trace(cur, s)));
            rows[l].w_top = std::max(rows[l].w_top, std::abs(top_trace(cur, s)));
        }
    }
    for (std::size_t j = 0; j < rho0.nx; ++j) {
        std::vector<double> cur = column_of(rho0, j);
        rows[0].rho_bottom = std::max(rows[0].rho_bottom, std::abs(bottom_trace(cur, 1)));
        rows[0].rho_top = std::max(rows[0].rho_top, std::abs(top_trace(cur, 1)));
        for (std::size_t l = 1; l <= k; ++l) {
            cur = ops.t2(cur);
            const std::size_t s = trace_offset(l);
            rows[l].rho_bottom = std::max(rows[l].rho_bottom, std::abs(bottom_trace(cur, s)));
            rows[l].rho_top = std::max(rows[l].rho_top, std::abs(top_trace(cur, s)));
        }
    }
    for (std::size_t j = 0; j < v0.nx; ++j) {
        std::vector<double> cur = column_of(v0, j);
        for (std::size_t l = 1; l <= k; ++l) {
            if (l > 1) cur = ops.t1(cur);
            deriv(ops.grid, cur.data(), d.data());
            const std::size_t s = trace_offset(l);
            rows[l].v_bottom = std::max(rows[l].v_bottom, std::abs(bottom_trace(d, s)));
            rows[l].v_top = std::max(rows[l].v_top, std::abs(top_trace(d, s)));
        }
    }
    return rows;
}

DecayReport modal_decay_report(const ModalCoefficients& coeffs, const ModeSet& modes,
                               double nu, double s) {
    if (coeffs.count != modes.count)
        fail(ErrorCode::InvalidParams, "modal_decay_report: truncation mismatch");
    if (coeffs.nx < 8)
        fail(ErrorCode::InvalidParams,
             "modal_decay_report: need at least 8 horizontal samples for spectral norms");

    const Dft dft(coeffs.nx);
    const std::vector<double> kvec = wavenumbers(coeffs.nx, coeffs.length);
    const double sigma = s - nu;

    auto row_norm = [&](const ModalField& field, std::size_t r) {
        std::vector<double> phys(field.row(r), field.row(r) + field.nx);
        return hs_norm_sq(dft.forward(phys), kvec, sigma);
    };

    DecayReport report;
    report.v_partial.resize(modes.count);
    report.w_partial.resize(modes.count);
    report.rho_partial.resize(modes.count);
    double av = 0.0, aw = 0.0, ar = 0.0;
    for (std::size_t r = 0; r < modes.count; ++r) {
        const double weight = std::pow(modes.speeds[r], -2.0 * nu);
        av += weight * row_norm(coeffs.v, r + 1);  // barotropic row excluded
        aw += weight * row_norm(coeffs.w, r);
        ar += weight * row_norm(coeffs.rho, r);
        report.v_partial[r] = av;
        report.w_partial[r] = aw;
        report.rho_partial[r] = ar;
    }
    return report;
}

}  // namespace strato
