#pragma once

#include <cstddef>
#include <vector>

#include "strato/exec.hpp"
#include "strato/modes.hpp"

namespace strato {

// Sample array on the vertical grid times a periodic horizontal grid of
// period `length`, z-major: data[iz*nx + ix].
struct Field2D {
    std::size_t nz = 0;
    std::size_t nx = 0;
    double length = 0.0;
    std::vector<double> data;

    Field2D() = default;
    Field2D(std::size_t nz_, std::size_t nx_, double length_)
        : nz(nz_), nx(nx_), length(length_), data(nz_ * nx_, 0.0) {}

    double* row(std::size_t iz) { return data.data() + iz * nx; }
    const double* row(std::size_t iz) const { return data.data() + iz * nx; }
    double& at(std::size_t iz, std::size_t ix) { return data[iz * nx + ix]; }
    double at(std::size_t iz, std::size_t ix) const { return data[iz * nx + ix]; }
};

// Per-mode horizontal fields; row r holds one vertical coefficient as a
// function of x. Row/mode correspondence depends on the family (g-family
// rows include the barotropic mode 0, f-family rows start at mode 1).
struct ModalField {
    std::size_t rows = 0;
    std::size_t nx = 0;
    double length = 0.0;
    std::vector<double> data;

    ModalField() = default;
    ModalField(std::size_t rows_, std::size_t nx_, double length_)
        : rows(rows_), nx(nx_), length(length_), data(rows_ * nx_, 0.0) {}

    double* row(std::size_t r) { return data.data() + r * nx; }
    const double* row(std::size_t r) const { return data.data() + r * nx; }
    double& at(std::size_t r, std::size_t ix) { return data[r * nx + ix]; }
    double at(std::size_t r, std::size_t ix) const { return data[r * nx + ix]; }
};

// Complete modal description of one flow state. Conventions:
//   V   = sum_{n>=0} v_n g_n
//   w   = sum_{n>=1} w_n f_n
//   rho = (1/g) sum_{n>=1} rho_n rho_eq N^2 f_n   (full)
//         sum_{n>=1} rho_n N^2 f_n               (Boussinesq)
//   P   = sum_{n>=0} p_n rho_eq g_n               (rho_eq = 1 Boussinesq)
struct ModalCoefficients {
    std::size_t count = 0;  // M
    std::size_t nx = 0;
    double length = 0.0;
    ModalField v;    // rows count+1, row n = mode n
    ModalField w;    // rows count, row r = mode r+1
    ModalField rho;  // rows count, row r = mode r+1
    ModalField p;    // rows count+1, row n = mode n
};

struct PhysicalFields {
    Field2D v, w, rho, p;
};

// Weighted vertical quadrature of the field against each basis function, per
// horizontal sample. The g-family additionally solves its Gram system so the
// round trip through reconstruct_field is the identity on the modal span.
ModalField project(const Field2D& field, const ModeSet& modes, Basis basis,
                   Exec exec = Exec::Parallel);

Field2D reconstruct_field(const ModalField& coeffs, const ModeSet& modes, Basis basis,
                          Exec exec = Exec::Parallel);

ModalCoefficients decompose(const PhysicalFields& fields, const ModeSet& modes,
                            Exec exec = Exec::Parallel);

PhysicalFields reconstruct(const ModalCoefficients& coeffs, const ModeSet& modes,
                           Exec exec = Exec::Parallel);

// Modal representation of a vertical derivative:
//   d/dz of w-type data lands on the g-family with coefficients w_n / c_n,
//   d/dz of P-type data lands on the dual family with coefficients -p_n / c_n
// (the barotropic P term is z-independent and drops out exactly).
enum class DerivativeTarget { W, P };

ModalField vertical_derivative_coeffs(const ModalField& coeffs, const ModeSet& modes,
                                      DerivativeTarget which);

// Discrete second-order vertical operators
//   T1 u = d/dz( inv_slope * d/dz(mass * u) )
//   T2 u = d/dz( mass * d/dz(inv_slope * u) )
//   T3 u = inv_slope * d/dz( mass * d/dz u )
// with mass = rho_eq (ones in Boussinesq) and inv_slope = 1/(-d rho_eq/dz),
// the latter formed from rho_eq N^2 / g so no discrete differentiation of the
// profile is involved. t1_adjoint/t2_adjoint are exact matrix transposes in
// the unweighted discrete inner product sum_i u_i v_i; the transposed
// one-sided end stencils make them inconsistent (O(1/dz)) on the few rows
// nearest each wall. t3 is the consistent direct discretization of the
// continuum adjoint of T2 and agrees with t2_adjoint away from the walls.
struct VerticalOperatorPair {
    VerticalGrid grid;
    std::vector<double> mass;
    std::vector<double> inv_slope;

    std::vector<double> t1(const std::vector<double>& u) const;
    std::vector<double> t2(const std::vector<double>& u) const;
    std::vector<double> t3(const std::vector<double>& u) const;
    std::vector<double> t1_adjoint(const std::vector<double>& u) const;
    std::vector<double> t2_adjoint(const std::vector<double>& u) const;
};

// Throws Error(OperatorSingular) when the density slope degenerates anywhere
// (min rho_eq N^2 / g below floor_rel times its maximum).
VerticalOperatorPair build_vertical_operators(const DensityProfile& profile,
                                              const BruntVaisala& stratification,
                                              double floor_rel = 1e-8);

// Absolute boundary traces of the iterated vertical operators applied to
// initial data, maximized over horizontal samples:
//   order l:  |d/dz T1^{l-1} v0|,  |T3^l w0|,  |T2^l rho0|  at z=-H, 0.
// The v entry at l = 0 is vacuous and reported as zero. Traces are evaluated
// by quadratic extrapolation from rows s, s+1, s+2 with s = max(1, 2l+2),
// skipping the band where each derivative layer's one-sided end stencils
// dominate. Requires grid size >= 4k + 9.
struct CompatibilityRow {
    std::size_t order = 0;
    double v_bottom = 0.0, v_top = 0.0;
    double w_bottom = 0.0, w_top = 0.0;
    double rho_bottom = 0.0, rho_top = 0.0;
};

std::vector<CompatibilityRow> compatibility_check(const Field2D& v0, const Field2D& w0,
                                                  const Field2D& rho0,
                                                  const VerticalOperatorPair& ops,
                                                  std::size_t k);

// Partial sums over modes n = 1..M of c_n^{-2 nu} * ||coef_n||^2_{H^{s-nu}},
// Sobolev norms taken spectrally on the periodic horizontal grid. Monotone by
// construction; saturation or unbounded growth is the caller's verdict.
struct DecayReport {
    std::vector<double> v_partial;
    std::vector<double> w_partial;
    std::vector<double> rho_partial;
};

DecayReport modal_decay_report(const ModalCoefficients& coeffs, const ModeSet& modes,
                               double nu, double s);

// (length/nx) * sum of squares: the discrete L^2(dx) norm on the torus.
inline double horizontal_norm_sq(const double* row, std::size_t nx, double length) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nx; ++j) acc += row[j] * row[j];
    return acc * (length / static_cast<double>(nx));
}

}  // namespace strato
