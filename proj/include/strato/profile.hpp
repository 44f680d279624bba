#pragma once

#include <string>
#include <vector>

#include "strato/grid.hpp"

namespace strato {

// Governs which eigenproblem, weights, and evolution equations apply:
// Full keeps the equilibrium density in the operator; Boussinesq drops it
// and reads the buoyancy frequency straight off the nondimensional profile.
enum class Variant { Full, Boussinesq };

const char* variant_name(Variant v);

// Equilibrium density sampled on a uniform vertical grid. rho is strictly
// decreasing in z (stable stratification, checked with zero tolerance).
struct DensityProfile {
    Variant variant = Variant::Full;
    VerticalGrid grid;
    std::vector<double> rho;
    double g = 1.0;  // gravitational acceleration (unused numerically in Boussinesq)
};

// Squared buoyancy frequency on the same grid, n2[i] > 0 everywhere.
struct BruntVaisala {
    VerticalGrid grid;
    std::vector<double> n2;
    bool is_constant(double rel_tol = 1e-10) const;
    double constant_value() const;  // mean of n2; meaningful when is_constant()
};

// rho(z) = rho0 * exp(-rate * z). constant-N full profile: rate = N^2/g.
DensityProfile build_exponential(double rho0, double rate, double depth, double g,
                                 std::size_t grid_size, Variant variant);

// Full-variant profile with exactly constant buoyancy frequency N.
DensityProfile build_constant_n(double n_value, double rho0, double depth, double g,
                                std::size_t grid_size);

// Boussinesq nondimensional profile with constant N: rho(z) = rho0 - n2 * z.
DensityProfile build_boussinesq_constant_n(double n_value, double rho0, double depth,
                                           std::size_t grid_size);

// Smoothed two-layer profile: rho(z) = rho_plus * exp(-delta * z)
//   - (rho_plus - rho_minus) * chi((z - z0)/delta),
// where chi ramps 0 -> 1 across (0,1) via the C-infinity bump
// exp(-1/(x(1-x))). The transition layer occupies [z0, z0 + delta].
DensityProfile build_smoothed_jump(double rho_plus, double rho_minus, double z0,
                                   double delta, double depth, double g,
                                   std::size_t grid_size, Variant variant);

// Arbitrary samples (ascending z spanning [-depth, 0]) resampled to a uniform
// grid by monotone cubic interpolation, then validated like any other profile.
DensityProfile build_tabulated(const std::vector<double>& z_samples,
                               const std::vector<double>& rho_samples, double depth,
                               double g, std::size_t grid_size, Variant variant);

// Reads a two-column CSV (z, rho) and delegates to build_tabulated.
DensityProfile build_tabulated_csv(const std::string& path, double depth, double g,
                                   std::size_t grid_size, Variant variant);

// N^2 = -g dln(rho)/dz (full) or -drho/dz (Boussinesq), second-order stencils
// (centered inside, one-sided at the ends). Throws on any n2 <= 0.
BruntVaisala brunt_vaisala(const DensityProfile& profile);

// Normalized C-infinity bump on (0,1) and its primitive ramp; exposed for the
// sharp-interface construction and its tests.
namespace bump {
double density(double x);  // exp(-1/(x(1-x))) / integral, 0 outside (0,1)
double ramp(double x);     // integral of density from 0 to x, clamps to {0,1}
double raw_integral();     // integral of exp(-1/(x(1-x))) over (0,1)
}  // namespace bump

}  // namespace strato
