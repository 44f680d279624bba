#include "strato/nonlinear.hpp"

#include <cmath>
#include <string>

#include "strato/errors.hpp"

namespace strato {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_state(const NonlinearState& s, const char* where) {
    const std::string tag(where);
    if (s.count < 1) fail(ErrorCode::InvalidParams, tag + ": no modes");
    if (s.nx < 8) fail(ErrorCode::InvalidParams, tag + ": horizontal grid needs at least 8 points");
    if (!(s.length > 0.0))
        fail(ErrorCode::InvalidParams, tag + ": domain length must be positive");
    if (!(s.eps >= 0.0 && s.eps <= 1.0))
        fail(ErrorCode::InvalidParams, tag + ": eps outside [0, 1]");
    if (!(s.mu > 0.0 && s.mu <= 1.0))
        fail(ErrorCode::InvalidParams, tag + ": mu outside (0, 1]");
    if (!(s.n_value > 0.0))
        fail(ErrorCode::InvalidParams, tag + ": buoyancy frequency must be positive");
    if (s.v.size() != s.count * s.nx || s.rho.size() != s.count * s.nx ||
        s.mask.size() != s.nx)
        fail(ErrorCode::InvalidParams, tag + ": field shape mismatch");
}

void check_table(const NonlinearState& s, const InteractionTable& table,
                 const char* where) {
    if (table.count != s.count)
        fail(ErrorCode::InvalidParams,
             std::string(where) + ": interaction table truncation does not match the state");
}

// One derivative evaluation with a caller-owned plan so the four stages of a
// step reuse it. Forcing products are taken pointwise in physical space; the
// per-target accumulation order is the table order, independent of exec.
NonlinearRhs evaluate(const Dft& dft, const std::vector<double>& kvec,
                      const NonlinearState& state, const InteractionTable& table,
                      Exec exec) {
    const std::size_t m = state.count, nx = state.nx;
    NonlinearRhs out;
    out.v.assign(m * nx, Complex(0.0, 0.0));
    out.rho.assign(m * nx, Complex(0.0, 0.0));

    std::vector<std::vector<double>> vp(m), dvp(m), rp(m), drp(m);
    parallel_for(m, exec, [&](std::size_t r) {
        std::vector<Complex> row(nx), der(nx);
        for (std::size_t j = 0; j < nx; ++j) {
            row[j] = state.v_at(r, j);
            der[j] = Complex(0.0, kvec[j]) * row[j];
        }
        vp[r] = dft.inverse_real(row);
        dvp[r] = dft.inverse_real(der);
        for (std::size_t j = 0; j < nx; ++j) {
            row[j] = state.rho_at(r, j);
            der[j] = Complex(0.0, kvec[j]) * row[j];
        }
        rp[r] = dft.inverse_real(row);
        drp[r] = dft.inverse_real(der);
    });

    std::vector<std::vector<std::size_t>> by_target(m);
    for (std::size_t t = 0; t < table.triples.size(); ++t)
        by_target[table.triples[t].n - 1].push_back(t);

    parallel_for(m, exec, [&](std::size_t r) {
        std::vector<double> fv(nx, 0.0), fr(nx, 0.0);
        for (std::size_t idx : by_target[r]) {
            const InteractionTriple& t = table.triples[idx];
            const double ratio = static_cast<double>(t.q) / static_cast<double>(t.p);
            const double wb = state.eps * t.beta;
            const double wg = state.eps * t.gamma;
            // the difference branch is ordered: q - p = n flips the buoyancy
            // coupling relative to p - q = n
            const double sign = (t.q == t.n + t.p) ? -1.0 : 1.0;
            const double* a = vp[t.p - 1].data();
            const double* da = dvp[t.p - 1].data();
            const double* b = vp[t.q - 1].data();
            const double* db = dvp[t.q - 1].data();
            const double* rb = rp[t.q - 1].data();
            const double* drb = drp[t.q - 1].data();
            for (std::size_t i = 0; i < nx; ++i) {
                fv[i] += wg * ratio * (da[i] * b[i]) - wb * (a[i] * db[i]);
                fr[i] += sign * (wb * ratio * (da[i] * rb[i]) - wg * (a[i] * drb[i]));
            }
        }
        const auto fv_hat = dft.forward(fv);
        const auto fr_hat = dft.forward(fr);
        const double n_index = static_cast<double>(r + 1);
        const double cn = state.n_value / (n_index * kPi);
        for (std::size_t j = 0; j < nx; ++j) {
            const double k = kvec[j];
            const Complex vq = state.mask[j] ? fv_hat[j] : Complex(0.0, 0.0);
            const Complex rq = state.mask[j] ? fr_hat[j] : Complex(0.0, 0.0);
            const double denom = 1.0 + state.mu * k * k / (kPi * kPi * n_index * n_index);
            out.v[r * nx + j] = (vq - Complex(0.0, k * cn) * state.rho_at(r, j)) / denom;
            out.rho[r * nx + j] = rq - Complex(0.0, k * cn) * state.v_at(r, j);
        }
    });
    return out;
}

}  // namespace

NonlinearState make_nonlinear_state(std::size_t m, std::size_t nx, double length,
                                    double eps, double mu, double n_value) {
    NonlinearState s;
    s.count = m;
    s.nx = nx;
    s.length = length;
    s.eps = eps;
    s.mu = mu;
    s.n_value = n_value;
    s.v.assign(m * nx, Complex(0.0, 0.0));
    s.rho.assign(m * nx, Complex(0.0, 0.0));
    s.mask = dealias_mask(nx);
    check_state(s, "make_nonlinear_state");
    return s;
}

NonlinearRhs nonlinear_rhs(const NonlinearState& state, const InteractionTable& table,
                           Exec exec) {
    check_state(state, "nonlinear_rhs");
    check_table(state, table, "nonlinear_rhs");
    const Dft dft(state.nx);
    return evaluate(dft, wavenumbers(state.nx, state.length), state, table, exec);
}

void step_rk4(NonlinearState& state, double dt, const InteractionTable& table,
              Exec exec) {
    check_state(state, "step_rk4");
    check_table(state, table, "step_rk4");
    if (!(dt > 0.0)) fail(ErrorCode::InvalidParams, "step_rk4: dt must be positive");

    const std::size_t total = state.count * state.nx;
    const Dft dft(state.nx);
    const auto kvec = wavenumbers(state.nx, state.length);
    const double half = 0.5 * dt;

    const auto k1 = evaluate(dft, kvec, state, table, exec);
    NonlinearState stage = state;
    for (std::size_t i = 0; i < total; ++i) {
        stage.v[i] = state.v[i] + half * k1.v[i];
        stage.rho[i] = state.rho[i] + half * k1.rho[i];
    }
    stage.time = state.time + half;
    const auto k2 = evaluate(dft, kvec, stage, table, exec);
    for (std::size_t i = 0; i < total; ++i) {
        stage.v[i] = state.v[i] + half * k2.v[i];
        stage.rho[i] = state.rho[i] + half * k2.rho[i];
    }
    const auto k3 = evaluate(dft, kvec, stage, table, exec);
    for (std::size_t i = 0; i < total; ++i) {
        stage.v[i] = state.v[i] + dt * k3.v[i];
        stage.rho[i] = state.rho[i] + dt * k3.rho[i];
    }
    stage.time = state.time + dt;
    const auto k4 = evaluate(dft, kvec, stage, table, exec);

    const double w = dt / 6.0;
    for (std::size_t i = 0; i < total; ++i) {
        state.v[i] += w * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
        state.rho[i] += w * (k1.rho[i] + 2.0 * k2.rho[i] + 2.0 * k3.rho[i] + k4.rho[i]);
    }
    state.time += dt;

    for (std::size_t i = 0; i < total; ++i) {
        const bool ok = std::isfinite(state.v[i].real()) && std::isfinite(state.v[i].imag()) &&
                        std::isfinite(state.rho[i].real()) &&
                        std::isfinite(state.rho[i].imag());
        if (!ok)
            fail(ErrorCode::BlowupDetected,
                 "step_rk4: non-finite field at time " + std::to_string(state.time));
    }
}

std::vector<ActivationRow> mode_activation_history(
    const std::vector<NonlinearState>& trajectory) {
    std::vector<ActivationRow> rows;
    rows.reserve(trajectory.size());
    for (const auto& snap : trajectory) {
        ActivationRow row;
        row.time = snap.time;
        row.v_norm.resize(snap.count);
        row.rho_norm.resize(snap.count);
        for (std::size_t r = 0; r < snap.count; ++r) {
            double sv = 0.0, sr = 0.0;
            for (std::size_t j = 0; j < snap.nx; ++j) {
                sv += std::norm(snap.v_at(r, j));
                sr += std::norm(snap.rho_at(r, j));
            }
            row.v_norm[r] = std::sqrt(snap.length * sv);
            row.rho_norm[r] = std::sqrt(snap.length * sr);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace strato
