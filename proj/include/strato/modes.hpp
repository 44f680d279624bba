#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "strato/exec.hpp"
#include "strato/profile.hpp"

namespace strato {

// Which orthonormal family a Gram check or a projection refers to:
//  FBasis:       f_n, orthonormal under weight rho*N^2 (or N^2, Boussinesq)
//  GBasis:       g_0..g_M, orthonormal under weight rho (or 1)
//  WeightedDual: rho*N^2*f_n, orthonormal under weight 1/(rho*N^2)
enum class Basis { FBasis, GBasis, WeightedDual };

// First M vertical modes of the stratified column, plus the derived g-family
// and the quadrature weights they are orthonormal under. f_n vanish at both
// ends, first interior sample positive; speeds decrease strictly.
struct ModeSet {
    Variant variant = Variant::Full;
    VerticalGrid grid;
    double gravity = 1.0;
    std::size_t count = 0;                // M
    std::vector<double> speeds;           // c_1 > c_2 > ... > 0
    std::vector<std::vector<double>> f;   // f[n-1], n = 1..M
    std::vector<std::vector<double>> g;   // g[n], n = 0..M; g[0] barotropic
    std::vector<double> n2;               // squared buoyancy frequency samples
    std::vector<double> rho;              // density samples (ones in Boussinesq)
    std::vector<double> wf;               // rho .* n2 (or n2)
    std::vector<double> wg;               // rho (or ones)
    double alpha0 = 0.0;                  // barotropic normalization constant

    double dz() const { return grid.dz; }
};

// Solves (rho f')' + (rho N^2 / c^2) f = 0 (full) or f'' + (N^2/c^2) f = 0
// (Boussinesq) with Dirichlet ends, conservative second-order differences,
// eigenpairs by Sturm bisection + inverse iteration. Enforces the resolution
// guard m <= grid_size/4.
ModeSet solve_modes(const DensityProfile& profile, const BruntVaisala& stratification,
                    std::size_t m, Exec exec = Exec::Parallel);

// Constant-N Boussinesq closed forms sampled on the grid:
// c_n = N*depth/(n*pi), f_n = sqrt(2/depth)/N * sin(n*pi*(z+depth)/depth),
// g_n = sqrt(2/depth) * cos(n*pi*(z+depth)/depth), g_0 = 1/sqrt(depth).
ModeSet explicit_boussinesq_modes(double n_value, double depth, std::size_t grid_size,
                                  std::size_t m);

// Gram matrix of the requested family minus the identity, trapezoid weights.
std::vector<std::vector<double>> orthonormality_residual(const ModeSet& modes, Basis which,
                                                         Exec exec = Exec::Parallel);

double max_abs(const std::vector<std::vector<double>>& matrix);
double max_abs_offdiag(const std::vector<std::vector<double>>& matrix);

void write_speeds_csv(const ModeSet& modes, const std::string& path);
void write_modes_csv(const ModeSet& modes, const std::string& path);

}  // namespace strato
