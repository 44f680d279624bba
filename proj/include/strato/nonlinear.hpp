#pragma once

#include <cstddef>
#include <vector>

#include "strato/exec.hpp"
#include "strato/fourier.hpp"
#include "strato/mixing.hpp"

namespace strato {

// Spectral state of the quadratically coupled constant-stratification modal
// system on a periodic horizontal domain of unit depth. Row r carries mode
// n = r + 1 of the transport amplitude V_n and the buoyancy amplitude rho_n;
// the gravity-wave speeds are c_n = N/(n pi). eps scales the quadratic
// coupling (eps = 0 is the linear reduction), mu the vertical-inertia
// correction. The mask implements the 2/3 dealias rule and never passes the
// Nyquist bin, so states built here keep conjugate symmetry under stepping.
struct NonlinearState {
    std::size_t count = 0;
    std::size_t nx = 0;
    double length = 0.0;
    double time = 0.0;
    double eps = 0.0;
    double mu = 1.0;
    double n_value = 0.0;
    std::vector<char> mask;
    std::vector<Complex> v, rho;  // row-major [count][nx]

    Complex& v_at(std::size_t r, std::size_t j) { return v[r * nx + j]; }
    Complex v_at(std::size_t r, std::size_t j) const { return v[r * nx + j]; }
    Complex& rho_at(std::size_t r, std::size_t j) { return rho[r * nx + j]; }
    Complex rho_at(std::size_t r, std::size_t j) const { return rho[r * nx + j]; }
};

// Zero fields with validated parameters: 0 <= eps <= 1, 0 < mu <= 1, N > 0.
NonlinearState make_nonlinear_state(std::size_t m, std::size_t nx, double length,
                                    double eps, double mu, double n_value);

struct NonlinearRhs {
    std::vector<Complex> v, rho;  // row-major [count][nx]
};

// Time derivative of the modal system
//   (1 + mu k^2/(pi^2 n^2)) dV_n/dt = -i k c_n rho_n + Fv_n(k),
//                         drho_n/dt = -i k c_n V_n  + Fr_n(k).
// The quadratic forcings run over the ordered selection pairs of `table`
// (p + q = n and |p - q| = n branches) and are formed pointwise in physical
// space, transformed back, and dealiased before the linear terms enter:
//   Fv_n = -eps sum  [ beta  V_p dV_q - gamma (q/p) dV_p V_q ]
//   Fr_n = -eps sum s[ gamma V_p drho_q - beta (q/p) dV_p rho_q ]
// with s = -1 on the q - p = n branch and +1 otherwise. The table truncation
// must equal the state truncation; pairs beyond it were already dropped (and
// counted) when the table was built.
NonlinearRhs nonlinear_rhs(const NonlinearState& state, const InteractionTable& table,
                           Exec exec = Exec::Parallel);

// Classical four-stage Runge-Kutta update in place; advances state.time by
// dt. The result is scanned for non-finite values and BlowupDetected reports
// the failure time, since strong data can legitimately leave the guaranteed
// existence horizon. dt is not stability-checked; keep dt <= 0.5 dx / c_1.
void step_rk4(NonlinearState& state, double dt, const InteractionTable& table,
              Exec exec = Exec::Parallel);

// Per-snapshot horizontal L2 norms sqrt(length * sum_k |amp_k|^2) of every
// mode row, exposing which modes the quadratic coupling activates and when.
struct ActivationRow {
    double time = 0.0;
    std::vector<double> v_norm, rho_norm;  // index r = mode r + 1
};

std::vector<ActivationRow> mode_activation_history(
    const std::vector<NonlinearState>& trajectory);

}  // namespace strato
