#include "strato/linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strato/mixing.hpp"

namespace strato {

namespace {

void check_dispersion(const Dispersion& disp) {
    if (!(disp.n2_ref > 0.0))
        fail(ErrorCode::InvalidParams, "dispersion: reference stratification must be positive");
    if (!(disp.mu >= 0.0)) fail(ErrorCode::InvalidParams, "dispersion: mu must be >= 0");
}

void check_state(const LinearState& state, const char* what) {
    if (state.count == 0 || state.nx < 2 || !(state.length > 0.0))
        fail(ErrorCode::InvalidParams, std::string(what) + ": empty state");
    if (state.v.size() != state.count * state.nx || state.rho.size() != state.v.size())
        fail(ErrorCode::InvalidParams, std::string(what) + ": state storage mismatch");
}

void check_pair(const LinearState& state, const ModeSet& modes, const char* what) {
    check_state(state, what);
    if (state.count != modes.count)
        fail(ErrorCode::InvalidParams, std::string(what) + ": truncation mismatch");
}

}  // namespace

double dispersion_omega(double speed, double k, const Dispersion& disp) {
    check_dispersion(disp);
    if (!(speed > 0.0)) fail(ErrorCode::InvalidParams, "dispersion: speed must be positive");
    const double ck = speed * k;
    return std::abs(ck) / std::sqrt(1.0 + disp.mu * ck * ck / disp.n2_ref);
}

LinearState make_linear_state(const ModalCoefficients& coeffs) {
    if (coeffs.count == 0 || coeffs.nx < 2)
        fail(ErrorCode::InvalidParams, "make_linear_state: empty coefficients");
    LinearState state(coeffs.count, coeffs.nx, coeffs.length);
    const Dft dft(coeffs.nx);
    for (std::size_t r = 0; r < coeffs.count; ++r) {
        std::vector<double> row(coeffs.v.row(r + 1), coeffs.v.row(r + 1) + coeffs.nx);
        auto spec = dft.forward(row);
        zero_nyquist(spec);
        std::copy(spec.begin(), spec.end(), state.v.begin() + r * coeffs.nx);
        row.assign(coeffs.rho.row(r), coeffs.rho.row(r) + coeffs.nx);
        spec = dft.forward(row);
        zero_nyquist(spec);
        std::copy(spec.begin(), spec.end(), state.rho.begin() + r * coeffs.nx);
    }
    return state;
}

ModalCoefficients to_coefficients(const LinearState& state, const ModeSet& modes) {
    check_pair(state, modes, "to_coefficients");
    ModalCoefficients coeffs;
    coeffs.count = state.count;
    coeffs.nx = state.nx;
    coeffs.length = state.length;
    coeffs.v = ModalField(state.count + 1, state.nx, state.length);
    coeffs.w = ModalField(state.count, state.nx, state.length);
    coeffs.rho = ModalField(state.count, state.nx, state.length);
    coeffs.p = ModalField(state.count + 1, state.nx, state.length);

    const Dft dft(state.nx);
    const std::vector<double> kvec = wavenumbers(state.nx, state.length);
    std::vector<Complex> spec(state.nx);
    for (std::size_t r = 0; r < state.count; ++r) {
        spec.assign(state.v.begin() + r * state.nx, state.v.begin() + (r + 1) * state.nx);
        auto phys = dft.inverse_real(spec);
        std::copy(phys.begin(), phys.end(), coeffs.v.row(r + 1));
        for (std::size_t j = 0; j < state.nx; ++j)
            spec[j] *= Complex(0.0, -modes.speeds[r] * kvec[j]);
        phys = dft.inverse_real(spec);
        std::copy(phys.begin(), phys.end(), coeffs.w.row(r));
        spec.assign(state.rho.begin() + r * state.nx, state.rho.begin() + (r + 1) * state.nx);
        phys = dft.inverse_real(spec);
        std::copy(phys.begin(), phys.end(), coeffs.rho.row(r));
    }
    return coeffs;
}

void step_uncoupled(LinearState& state, const ModeSet& modes, const Dispersion& disp,
                    double dt, Exec exec) {
    check_pair(state, modes, "step_uncoupled");
    check_dispersion(disp);
    const std::vector<double> kvec = wavenumbers(state.nx, state.length);
    const std::size_t nx = state.nx;
    parallel_for(state.count, exec, [&](std::size_t r) {
        const double c = modes.speeds[r];
        for (std::size_t j = 0; j < nx; ++j) {
            const double k = kvec[j];
            if (k == 0.0) continue;
            // the rotation coefficients are fixed per (mode, wavenumber), so
            // any rounding bias in them repeats every step and accumulates
            // linearly in the energy; extended precision pushes that bias
            // below the random-walk floor of the final double rounding
            const long double ck = static_cast<long double>(c) * k;
            const long double amp =
                1.0L + static_cast<long double>(disp.mu) * ck * ck / disp.n2_ref;
            const long double root = sqrtl(amp);
            const long double omega = fabsl(ck) / root;
            const long double phase = omega * dt;
            const long double cs = cosl(phase);
            const long double sn = k > 0.0 ? sinl(phase) : -sinl(phase);
            const Complex vv = state.v_at(r, j), rr = state.rho_at(r, j);
            const long double vre = cs * vv.real() + sn / root * rr.imag();
            const long double vim = cs * vv.imag() - sn / root * rr.real();
            const long double rre = cs * rr.real() + sn * root * vv.imag();
            const long double rim = cs * rr.imag() - sn * root * vv.real();
            state.v_at(r, j) = Complex(static_cast<double>(vre), static_cast<double>(vim));
            state.rho_at(r, j) =
                Complex(static_cast<double>(rre), static_cast<double>(rim));
        }
    });
}

double uncoupled_energy(const LinearState& state, const ModeSet& modes,
                        const Dispersion& disp) {
    check_pair(state, modes, "uncoupled_energy");
    check_dispersion(disp);
    const std::vector<double> kvec = wavenumbers(state.nx, state.length);
    double total = 0.0;
    for (std::size_t r = 0; r < state.count; ++r) {
        const double c = modes.speeds[r];
        for (std::size_t j = 0; j < state.nx; ++j) {
            const double ck = c * kvec[j];
            const double amp = 1.0 + disp.mu * ck * ck / disp.n2_ref;
            total += amp * std::norm(state.v_at(r, j)) + std::norm(state.rho_at(r, j));
        }
    }
    return total;
}

CoupledStepper::CoupledStepper(const ModeSet& modes, const std::vector<double>& alpha,
                               double mu, std::size_t nx, double length, double dt)
    : count_(modes.count), nx_(nx), length_(length), dt_(dt), speeds_(modes.speeds) {
    if (count_ == 0 || nx < 2 || !(length > 0.0) || !(dt > 0.0))
        fail(ErrorCode::InvalidParams, "CoupledStepper: bad geometry or step size");
    if (!(mu >= 0.0)) fail(ErrorCode::InvalidParams, "CoupledStepper: mu must be >= 0");
    if (alpha.size() != count_ * count_)
        fail(ErrorCode::InvalidParams, "CoupledStepper: alpha size mismatch");
    kvec_ = wavenumbers(nx, length);

    // A(k) depends on k^2 only, so one factorization serves +-k
    std::vector<double> scaled(alpha);
    for (double& a : scaled) a *= mu;
    mass_.reserve(nx / 2 + 1);
    factors_.reserve(nx / 2 + 1);
    for (std::size_t j = 0; j <= nx / 2; ++j) {
        const double k = std::abs(kvec_[j]);
        SymMatrix a = coupled_mass_matrix(scaled, speeds_, k);
        mass_.push_back(a);
        const double theta = 0.5 * k * dt;
        for (std::size_t n = 0; n < count_; ++n)
            a.at(n, n) += theta * theta * speeds_[n] * speeds_[n];
        try {
            factors_.emplace_back(a);
        } catch (const Error&) {
            fail(ErrorCode::StepFailure, "CoupledStepper: midpoint matrix not factorizable");
        }
    }
}

void CoupledStepper::step(LinearState& state, Exec exec) const {
    check_state(state, "CoupledStepper::step");
    if (state.count != count_ || state.nx != nx_ || state.length != length_)
        fail(ErrorCode::InvalidParams, "CoupledStepper::step: state shape mismatch");
    const std::size_t m = count_, nx = nx_;
    parallel_for(nx, exec, [&](std::size_t j) {
        const double k = kvec_[j];
        if (k == 0.0) return;
        const double theta = 0.5 * k * dt_;
        const std::size_t idx = j <= nx / 2 ? j : nx - j;
        const SymMatrix& a = mass_[idx];
        std::vector<Complex> mid(m);
        for (std::size_t n = 0; n < m; ++n) {
            Complex acc = -Complex(0.0, theta * speeds_[n]) * state.rho_at(n, j);
            for (std::size_t q = 0; q < m; ++q) acc += a.at(n, q) * state.v_at(q, j);
            mid[n] = acc;
        }
        factors_[idx].solve_inplace(mid);
        for (std::size_t n = 0; n < m; ++n) {
            state.v_at(n, j) = 2.0 * mid[n] - state.v_at(n, j);
            state.rho_at(n, j) -= Complex(0.0, 2.0 * theta * speeds_[n]) * mid[n];
        }
    });
}

double CoupledStepper::energy(const LinearState& state) const {
    check_state(state, "CoupledStepper::energy");
    if (state.count != count_ || state.nx != nx_)
        fail(ErrorCode::InvalidParams, "CoupledStepper::energy: state shape mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < nx_; ++j) {
        const std::size_t idx = j <= nx_ / 2 ? j : nx_ - j;
        const SymMatrix& a = mass_[idx];
        for (std::size_t n = 0; n < count_; ++n) {
            total += std::norm(state.rho_at(n, j));
            for (std::size_t q = 0; q < count_; ++q)
                total +=
                    a.at(n, q) * std::real(std::conj(state.v_at(n, j)) * state.v_at(q, j));
        }
    }
    return total;
}

namespace {

// centered interior, second-order one-sided ends; complex columns
void deriv_z(const VerticalGrid& grid, const std::vector<Complex>& u,
             std::vector<Complex>& out) {
    const std::size_t n = grid.size;
    const double a = 1.0 / (2.0 * grid.dz);
    out[0] = a * (-3.0 * u[0] + 4.0 * u[1] - u[2]);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = a * (u[i + 1] - u[i - 1]);
    out[n - 1] = a * (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]);
}

}  // namespace

PdeResidual pde_residual(const LinearState& before, const LinearState& after, double dt,
                         const ModeSet& modes, const std::vector<double>& alpha,
                         const Dispersion& disp) {
    check_pair(before, modes, "pde_residual");
    check_state(after, "pde_residual");
    check_dispersion(disp);
    if (!(dt > 0.0)) fail(ErrorCode::InvalidParams, "pde_residual: dt must be positive");
    if (before.count != after.count || before.nx != after.nx)
        fail(ErrorCode::InvalidParams, "pde_residual: snapshot shapes differ");
    if (modes.variant != Variant::Boussinesq)
        fail(ErrorCode::InvalidParams, "pde_residual: Boussinesq profiles only");
    if (alpha.size() != before.count * before.count)
        fail(ErrorCode::InvalidParams, "pde_residual: alpha size mismatch");

    const std::size_t m = before.count, nx = before.nx, nz = modes.grid.size;
    const std::vector<double> kvec = wavenumbers(nx, before.length);

    std::vector<Cholesky> mass;
    mass.reserve(nx / 2 + 1);
    std::vector<double> scaled(alpha);
    for (double& a : scaled) a *= disp.mu;
    for (std::size_t j = 0; j <= nx / 2; ++j)
        mass.emplace_back(coupled_mass_matrix(scaled, modes.speeds, std::abs(kvec[j])));

    // residual spectra, z-major like Field2D
    std::vector<std::vector<Complex>> res(4, std::vector<Complex>(nz * nx));
    for (std::size_t j = 0; j < nx; ++j) {
        const double k = kvec[j];
        const Complex ik(0.0, k);

        // midpoint coefficients; pressure solves A P = C rho, which at k = 0
        // reduces to the hydrostatic balance of the mean column
        std::vector<Complex> vmid(m), rmid(m), vdot(m), rdot(m), pcol(m);
        for (std::size_t n = 0; n < m; ++n) {
            vmid[n] = 0.5 * (before.v_at(n, j) + after.v_at(n, j));
            rmid[n] = 0.5 * (before.rho_at(n, j) + after.rho_at(n, j));
            vdot[n] = (after.v_at(n, j) - before.v_at(n, j)) / dt;
            rdot[n] = (after.rho_at(n, j) - before.rho_at(n, j)) / dt;
            pcol[n] = modes.speeds[n] * rmid[n];
        }
        mass[j <= nx / 2 ? j : nx - j].solve_inplace(pcol);

        std::vector<Complex> vfield(nz), wfield(nz), wdot(nz), rfield(nz), rdot_field(nz),
            vdot_field(nz), pfield(nz), dz(nz);
        for (std::size_t n = 0; n < m; ++n) {
            const double c = modes.speeds[n];
            const Complex wmid = -c * ik * vmid[n];
            const Complex wdot_n = -c * ik * vdot[n];
            for (std::size_t i = 0; i < nz; ++i) {
                const double gi = modes.g[n + 1][i], fi = modes.f[n][i];
                const double di = modes.n2[i] * fi;
                vfield[i] += vmid[n] * gi;
                vdot_field[i] += vdot[n] * gi;
                wfield[i] += wmid * fi;
                wdot[i] += wdot_n * fi;
                rfield[i] += rmid[n] * di;
                rdot_field[i] += rdot[n] * di;
                pfield[i] += pcol[n] * gi;
            }
        }

        deriv_z(modes.grid, wfield, dz);
        for (std::size_t i = 0; i < nz; ++i) res[0][i * nx + j] = ik * vfield[i] + dz[i];
        for (std::size_t i = 0; i < nz; ++i)
            res[1][i * nx + j] = vdot_field[i] + ik * pfield[i];
        deriv_z(modes.grid, pfield, dz);
        for (std::size_t i = 0; i < nz; ++i)
            res[2][i * nx + j] = disp.mu * wdot[i] + dz[i] + rfield[i];
        for (std::size_t i = 0; i < nz; ++i)
            res[3][i * nx + j] = rdot_field[i] - modes.n2[i] * wfield[i];
    }

    // synthesize each z row back to physical x and take the sup norm
    const Dft dft(nx);
    double sup[4] = {0.0, 0.0, 0.0, 0.0};
    std::vector<Complex> phys(nx);
    for (int q = 0; q < 4; ++q)
        for (std::size_t i = 0; i < nz; ++i) {
            dft.inverse(res[q].data() + i * nx, phys.data());
            for (std::size_t j = 0; j < nx; ++j) sup[q] = std::max(sup[q], std::abs(phys[j]));
        }
    return PdeResidual{sup[0], sup[1], sup[2], sup[3]};
}

}  // namespace strato
