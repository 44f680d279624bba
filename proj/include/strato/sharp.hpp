#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "strato/exec.hpp"

namespace strato {

// Convergence record of the two-layer limit: first eigen-speeds of the
// smoothed-jump family against the closed-form interface speed, and the
// peak-matched eigenfunction shapes against the piecewise-linear limit.
// Orders are least-squares slopes of log(error) against log(delta) over the
// sharper half of the sweep.
struct SharpLimitReport {
    std::vector<double> delta_values;  // strictly decreasing
    std::vector<double> c1_values;
    double cbar = 0.0;
    std::vector<double> c1_sq_errors;  // |c1^2 - cbar^2|
    std::vector<double> sup_errors;    // max_z |f1 - fbar|, both scaled to 1 at z0
    double c1_sq_order = 0.0;
    double f_sup_order = 0.0;
    std::vector<double> z;                      // shared vertical sample grid
    std::vector<double> fbar;                   // scaled limit shape on z
    std::vector<std::vector<double>> f_shapes;  // scaled f_1 per delta on z
};

// Interface gravity-wave speed of the two-layer column with densities
// rho_plus below and rho_minus above a jump at z0 in (-1, 0):
//   cbar^2 = (rho_plus - rho_minus) g / (rho_plus/(z0+1) + rho_minus/(-z0)).
// rho_plus <= rho_minus is an unstable or neutral jump and is rejected.
double limit_speed(double rho_plus, double rho_minus, double z0, double g);

// Piecewise-linear limit eigenfunction sampled at z_grid: a (z+1) below z0
// and a (1+z0)/z0 * z above, a = 1/(sqrt((rho_plus-rho_minus) g) (z0+1));
// continuous at z0 and vanishing at z = -1 and z = 0.
std::vector<double> limit_eigenfunction(double rho_plus, double rho_minus, double z0,
                                        double g, const std::vector<double>& z_grid);

// For each delta: build the smoothed-jump profile, solve the first eigenpair
// of the full-variant column, and record the speed and shape errors against
// the limit objects. deltas must be strictly decreasing and each resolved by
// the uniform grid (spacing <= delta/8, else ResolutionError). Both shapes
// are rescaled to value 1 at z0 (same interpolation estimator) before the
// sup-norm comparison.
SharpLimitReport delta_sweep(double rho_plus, double rho_minus, double z0, double g,
                             const std::vector<double>& deltas, std::size_t grid_size,
                             Exec exec = Exec::Parallel);

// Columns delta, c1, c1_sq_err, f_sup_err.
void write_sharp_csv(const SharpLimitReport& report, const std::string& path);

}  // namespace strato
