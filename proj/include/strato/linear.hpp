#pragma once

#include <cstddef>
#include <vector>

#include "strato/exec.hpp"
#include "strato/fourier.hpp"
#include "strato/modes.hpp"
#include "strato/smallmat.hpp"
#include "strato/transform.hpp"

namespace strato {

// Horizontal spectra of the baroclinic linear system, rows for modes
// n = 1..count of the transport amplitude V_n and the buoyancy amplitude
// rho_n. The barotropic transport is constant under these dynamics and is
// not carried. States produced by make_linear_state have an empty Nyquist
// bin; the complex rotations below would break conjugate symmetry there.
struct LinearState {
    std::size_t count = 0;
    std::size_t nx = 0;
    double length = 0.0;
    std::vector<Complex> v, rho;  // row-major [count][nx]

    LinearState() = default;
    LinearState(std::size_t modes, std::size_t nx_, double length_)
        : count(modes), nx(nx_), length(length_), v(modes * nx_), rho(modes * nx_) {}

    Complex& v_at(std::size_t r, std::size_t j) { return v[r * nx + j]; }
    Complex v_at(std::size_t r, std::size_t j) const { return v[r * nx + j]; }
    Complex& rho_at(std::size_t r, std::size_t j) { return rho[r * nx + j]; }
    Complex rho_at(std::size_t r, std::size_t j) const { return rho[r * nx + j]; }
};

// mu switches the vertical-inertia correction; n2_ref is the squared
// buoyancy frequency entering it, so frequencies approach sqrt(n2_ref) from
// below as k grows. mu = 0 recovers the hydrostatic branch omega = c k.
struct Dispersion {
    double mu = 1.0;
    double n2_ref = 1.0;
};

// omega(k) = c |k| / sqrt(1 + mu c^2 k^2 / n2_ref)
double dispersion_omega(double speed, double k, const Dispersion& disp);

LinearState make_linear_state(const ModalCoefficients& coeffs);

// Inverse transform back to physical rows. The w rows are filled from the
// divergence diagnostic w_n = -c_n dV_n/dx; the barotropic v row and all p
// rows are zero (pressure is diagnostic and not reconstructed here).
ModalCoefficients to_coefficients(const LinearState& state, const ModeSet& modes);

// One exact rotation of every (n, k) pair of the per-mode system
//   (1 + mu c_n^2 k^2 / n2_ref) dV/dt = -i k c_n rho,   drho/dt = -i k c_n V.
void step_uncoupled(LinearState& state, const ModeSet& modes, const Dispersion& disp,
                    double dt, Exec exec = Exec::Parallel);

// sum over modes and wavenumbers of (1 + mu c^2 k^2 / n2_ref) |V|^2 + |rho|^2,
// invariant under step_uncoupled.
double uncoupled_energy(const LinearState& state, const ModeSet& modes,
                        const Dispersion& disp);

// Implicit midpoint for the alpha-coupled system
//   A(k) dV/dt = -i k C rho,   drho/dt = -i k C V,
// A(k) = I + mu k^2 (c_m c_n alpha_mn), C = diag(c_n). The scheme is a Cayley
// transform of a generator skew-adjoint under the A-weighted pairing, so
// V* A V + |rho|^2 is conserved to roundoff. One real SPD factorization of
// A + (k dt/2)^2 C^2 is cached per |k| at construction.
class CoupledStepper {
public:
    CoupledStepper(const ModeSet& modes, const std::vector<double>& alpha, double mu,
                   std::size_t nx, double length, double dt);

    void step(LinearState& state, Exec exec = Exec::Parallel) const;
    double energy(const LinearState& state) const;
    double dt() const { return dt_; }

private:
    std::size_t count_ = 0, nx_ = 0;
    double length_ = 0.0, dt_ = 0.0;
    std::vector<double> kvec_, speeds_;
    std::vector<SymMatrix> mass_;       // A(|k|), index j = 0..nx/2
    std::vector<Cholesky> factors_;     // A + theta^2 C^2, same indexing
};

// Sup norms over the reconstructed (x, z) grid of the four primitive-equation
// residuals, evaluated at the midpoint of two saved snapshots dt apart
// (finite difference in time, spectral derivative in x, second-order finite
// difference in z):
//   continuity:  dV/dx + dw/dz
//   horizontal:  dV/dt + dP/dx      (modal pressure solves A P = C rho; the
//                                    k = 0 column is the hydrostatic balance)
//   vertical:    mu dw/dt + dP/dz + rho
//   mass:        drho/dt - N^2 w
// With constant stratification all four vanish with (dt^2, dz^2); with
// variable stratification the vertical residual retains the part of the
// fields outside the truncated modal span, reported rather than hidden.
// Boussinesq profiles only.
struct PdeResidual {
    double continuity = 0.0;
    double horizontal = 0.0;
    double vertical = 0.0;
    double mass = 0.0;
};

PdeResidual pde_residual(const LinearState& before, const LinearState& after, double dt,
                         const ModeSet& modes, const std::vector<double>& alpha,
                         const Dispersion& disp);

}  // namespace strato
