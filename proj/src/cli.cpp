#include "strato/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strato/csv.hpp"
#include "strato/linear.hpp"
#include "strato/mixing.hpp"
#include "strato/modes.hpp"
#include "strato/nonlinear.hpp"
#include "strato/profile.hpp"
#include "strato/sharp.hpp"

namespace strato {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// config plumbing

ordered_json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config file " + path);
    ordered_json cfg;
    try {
        cfg = ordered_json::parse(in);
    } catch (const std::exception& e) {
        fail(ErrorCode::ConfigError, "config " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) fail(ErrorCode::ConfigError, "config root must be a JSON object");
    return cfg;
}

// Every key must be known to the command; silent typos would otherwise run
// with defaults and still produce plausible files.
void check_keys(const ordered_json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) fail(ErrorCode::ConfigError, where + ": unknown key \"" + item.key() + "\"");
    }
}

const ordered_json* find(const ordered_json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double need_number(const ordered_json& obj, const std::string& where, const char* key) {
    const ordered_json* v = find(obj, key);
    if (v == nullptr || !v->is_number())
        fail(ErrorCode::ConfigError, where + ": \"" + key + "\" must be a number");
    return v->get<double>();
}

double get_number(const ordered_json& obj, const std::string& where, const char* key,
                  double fallback) {
    return find(obj, key) == nullptr ? fallback : need_number(obj, where, key);
}

std::size_t need_count(const ordered_json& obj, const std::string& where, const char* key) {
    const ordered_json* v = find(obj, key);
    if (v == nullptr || !v->is_number_integer() || v->get<long long>() < 0)
        fail(ErrorCode::ConfigError, where + ": \"" + key + "\" must be a nonnegative integer");
    return static_cast<std::size_t>(v->get<long long>());
}

std::size_t get_count(const ordered_json& obj, const std::string& where, const char* key,
                      std::size_t fallback) {
    return find(obj, key) == nullptr ? fallback : need_count(obj, where, key);
}

std::string need_string(const ordered_json& obj, const std::string& where, const char* key) {
    const ordered_json* v = find(obj, key);
    if (v == nullptr || !v->is_string())
        fail(ErrorCode::ConfigError, where + ": \"" + key + "\" must be a string");
    return v->get<std::string>();
}

std::string get_string(const ordered_json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
    return find(obj, key) == nullptr ? fallback : need_string(obj, where, key);
}

Variant parse_variant(const std::string& name, const std::string& where) {
    if (name == "full") return Variant::Full;
    if (name == "boussinesq") return Variant::Boussinesq;
    fail(ErrorCode::ConfigError, where + ": variant must be \"full\" or \"boussinesq\"");
}

// ---------------------------------------------------------------------------
// profile block

struct BuiltProfile {
    DensityProfile profile;
    BruntVaisala bv;
    ordered_json resolved;  // config echo with defaults filled in
};

BuiltProfile build_profile(const ordered_json& cfg) {
    const ordered_json* p = find(cfg, "profile");
    if (p == nullptr || !p->is_object())
        fail(ErrorCode::ConfigError, "config: a \"profile\" object is required");
    const std::string where = "profile";
    const std::string kind = need_string(*p, where, "kind");
    const std::size_t nz = need_count(*p, where, "nz");
    const double depth = get_number(*p, where, "depth", 1.0);

    BuiltProfile out;
    ordered_json& r = out.resolved;
    r["kind"] = kind;
    r["nz"] = nz;
    r["depth"] = depth;

    if (kind == "boussinesq-constant-n") {
        check_keys(*p, where, {"kind", "nz", "depth", "n", "rho0"});
        const double n = need_number(*p, where, "n");
        const double rho0 = get_number(*p, where, "rho0", 1.0);
        out.profile = build_boussinesq_constant_n(n, rho0, depth, nz);
        r["n"] = n;
        r["rho0"] = rho0;
    } else if (kind == "constant-n") {
        check_keys(*p, where, {"kind", "nz", "depth", "n", "rho0", "gravity"});
        const double n = need_number(*p, where, "n");
        const double rho0 = get_number(*p, where, "rho0", 1.0);
        const double g = get_number(*p, where, "gravity", 1.0);
        out.profile = build_constant_n(n, rho0, depth, g, nz);
        r["n"] = n;
        r["rho0"] = rho0;
        r["gravity"] = g;
    } else if (kind == "exponential") {
        check_keys(*p, where, {"kind", "nz", "depth", "rho0", "rate", "gravity", "variant"});
        const double rho0 = get_number(*p, where, "rho0", 1.0);
        const double rate = need_number(*p, where, "rate");
        const double g = get_number(*p, where, "gravity", 1.0);
        const std::string variant = get_string(*p, where, "variant", "full");
        out.profile = build_exponential(rho0, rate, depth, g, nz, parse_variant(variant, where));
        r["rho0"] = rho0;
        r["rate"] = rate;
        r["gravity"] = g;
        r["variant"] = variant;
    } else if (kind == "smoothed-jump") {
        check_keys(*p, where,
                   {"kind", "nz", "depth", "rho_plus", "rho_minus", "z0", "delta", "gravity",
                    "variant"});
        const double rho_plus = need_number(*p, where, "rho_plus");
        const double rho_minus = need_number(*p, where, "rho_minus");
        const double z0 = need_number(*p, where, "z0");
        const double delta = need_number(*p, where, "delta");
        const double g = get_number(*p, where, "gravity", 1.0);
        const std::string variant = get_string(*p, where, "variant", "full");
        out.profile = build_smoothed_jump(rho_plus, rho_minus, z0, delta, depth, g, nz,
                                          parse_variant(variant, where));
        r["rho_plus"] = rho_plus;
        r["rho_minus"] = rho_minus;
        r["z0"] = z0;
        r["delta"] = delta;
        r["gravity"] = g;
        r["variant"] = variant;
    } else if (kind == "tabulated-csv") {
        check_keys(*p, where, {"kind", "nz", "depth", "path", "gravity", "variant"});
        const std::string path = need_string(*p, where, "path");
        const double g = get_number(*p, where, "gravity", 1.0);
        const std::string variant = get_string(*p, where, "variant", "full");
        out.profile = build_tabulated_csv(path, depth, g, nz, parse_variant(variant, where));
        r["path"] = path;
        r["gravity"] = g;
        r["variant"] = variant;
    } else {
        fail(ErrorCode::ConfigError,
             where + ": unknown kind \"" + kind +
                 "\" (expected boussinesq-constant-n, constant-n, exponential, smoothed-jump, "
                 "or tabulated-csv)");
    }
    out.bv = brunt_vaisala(out.profile);
    return out;
}

// ---------------------------------------------------------------------------
// manifest

// Everything here is a fixed choice of the library; runs differ only through
// the "config" block, so config + conventions fully determine every output.
ordered_json conventions() {
    ordered_json c;
    c["vertical_basis"] =
        "f-modes vanish at both ends, unit norm under the density-times-N^2 weight "
        "(N^2 alone in the Boussinesq variant), first interior sample positive";
    c["derived_basis"] =
        "g_n proportional to d(rho f_n)/dz, unit norm under the density weight; "
        "g_0 is the barotropic constant";
    c["speed_order"] = "eigen-speeds strictly decreasing with mode index";
    c["alpha"] =
        "Gram matrix of f-modes under the density weight; equals diag(1/N^2) at "
        "constant stratification";
    c["coupling_weights"] =
        "beta = 1/sqrt(2) on both selection branches p + q = n and |p - q| = n; "
        "gamma = +1/sqrt(2) on the sum branch, -1/sqrt(2) on the difference branch";
    c["nonlinear_tendency"] =
        "transport: -eps [beta V_p dV_q - gamma (q/p) dV_p V_q]; buoyancy: "
        "-eps s [gamma V_p drho_q - beta (q/p) dV_p rho_q], s = -1 exactly on the "
        "q - p = n branch; left divisor 1 + mu k^2/(pi^2 n^2)";
    c["dealias"] =
        "quadratic products formed pointwise in physical space, transformed, then "
        "masked by the 2/3 rule; the Nyquist bin is always dropped";
    c["spectra"] =
        "forward transforms carry the 1/nx factor; wavenumbers 2 pi j / length in "
        "signed FFT order";
    c["quadrature"] = "trapezoid on the uniform vertical grid";
    c["csv_numbers"] = "17 significant digits, locale independent, '\\n' line ends";
    return c;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ordered_json& resolved, const ordered_json& derived) {
    ordered_json man;
    man["tool"] = "strato";
    man["version"] = kCliVersion;
    man["command"] = command;
    man["config"] = resolved;
    man["conventions"] = conventions();
    man["derived"] = derived;
    const fs::path path = out_dir / "manifest.json";
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out << man.dump(2) << "\n";
}

const char* basis_label(Basis which) {
    switch (which) {
        case Basis::FBasis: return "f";
        case Basis::GBasis: return "g";
        default: return "dual";
    }
}

// ---------------------------------------------------------------------------
// commands

int cmd_modes(const ordered_json& cfg, const fs::path& out) {
    check_keys(cfg, "config", {"profile", "modes"});
    BuiltProfile built = build_profile(cfg);
    const std::size_t m = need_count(cfg, "config", "modes");
    ModeSet modes = solve_modes(built.profile, built.bv, m);

    write_speeds_csv(modes, (out / "speeds.csv").string());
    write_modes_csv(modes, (out / "modes.csv").string());

    CsvWriter gram({"family", "row", "col", "residual"});
    ordered_json residuals;
    for (Basis which : {Basis::FBasis, Basis::GBasis, Basis::WeightedDual}) {
        const auto res = orthonormality_residual(modes, which);
        for (std::size_t i = 0; i < res.size(); ++i)
            for (std::size_t j = 0; j < res[i].size(); ++j)
                gram.add_mixed_row({basis_label(which), std::to_string(i), std::to_string(j),
                                    format_double(res[i][j])});
        residuals[basis_label(which)] = max_abs(res);
    }
    gram.write((out / "orthonormality.csv").string());

    ordered_json resolved;
    resolved["profile"] = built.resolved;
    resolved["modes"] = m;
    ordered_json derived;
    derived["speeds"] = modes.speeds;
    derived["max_gram_residual"] = residuals;
    derived["files"] = {"speeds.csv", "modes.csv", "orthonormality.csv"};
    write_manifest(out, "modes", resolved, derived);
    return 0;
}

int cmd_mixing(const ordered_json& cfg, const fs::path& out) {
    check_keys(cfg, "config", {"profile", "modes"});
    BuiltProfile built = build_profile(cfg);
    const std::size_t m = need_count(cfg, "config", "modes");
    ModeSet modes = solve_modes(built.profile, built.bv, m);

    const std::vector<double> alpha = alpha_matrix(modes);
    write_alpha_csv(alpha, m, (out / "alpha.csv").string());

    const InteractionTable table = build_interactions(m);
    CsvWriter triples({"p", "q", "n", "beta", "gamma"});
    for (const InteractionTriple& t : table.triples)
        triples.add_mixed_row({std::to_string(t.p), std::to_string(t.q), std::to_string(t.n),
                               format_double(t.beta), format_double(t.gamma)});
    triples.write((out / "interactions.csv").string());

    double offdiag = 0.0;
    std::vector<double> diag(m);
    for (std::size_t i = 0; i < m; ++i) {
        diag[i] = alpha[i * m + i];
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) offdiag = std::max(offdiag, std::abs(alpha[i * m + j]));
    }

    ordered_json resolved;
    resolved["profile"] = built.resolved;
    resolved["modes"] = m;
    ordered_json derived;
    derived["alpha_diagonal"] = diag;
    derived["alpha_max_offdiag"] = offdiag;
    derived["triples"] = table.triples.size();
    derived["dropped_pairs"] = table.dropped;
    derived["files"] = {"alpha.csv", "interactions.csv"};
    write_manifest(out, "mixing", resolved, derived);
    return 0;
}

// Shared initial data for the linear and nonlinear steppers, written directly
// into the spectral rows. Seeded draws avoid std::uniform_real_distribution
// on purpose: the raw-bits mapping below is fixed by the standard, so the
// same seed yields the same bytes everywhere.
struct InitialData {
    std::vector<Complex> v, rho;
    ordered_json resolved;
};

InitialData build_initial(const ordered_json& cfg, std::size_t m, std::size_t nx) {
    const ordered_json* init = find(cfg, "initial");
    if (init == nullptr || !init->is_object())
        fail(ErrorCode::ConfigError, "config: an \"initial\" object is required for simulate");
    const std::string where = "initial";
    const std::string kind = need_string(*init, where, "kind");

    InitialData out;
    out.v.assign(m * nx, Complex(0.0, 0.0));
    out.rho.assign(m * nx, Complex(0.0, 0.0));
    out.resolved["kind"] = kind;

    const std::size_t band = nx / 3;  // dealias band; also keeps Nyquist empty
    if (kind == "seeded-random") {
        check_keys(*init, where, {"kind", "seed", "amplitude", "kmax"});
        const std::uint64_t seed = need_count(*init, where, "seed");
        const double amplitude = get_number(*init, where, "amplitude", 1.0);
        const std::size_t kmax = get_count(*init, where, "kmax", nx / 4);
        if (kmax == 0 || kmax > band)
            fail(ErrorCode::ConfigError,
                 where + ": kmax must lie in 1.." + std::to_string(band) +
                     " so the data stays inside the dealiased band");
        std::mt19937_64 gen(seed);
        auto unit = [&gen]() {
            return (static_cast<double>(gen() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
        };
        for (std::size_t r = 0; r < m; ++r) {
            const double row_amp = amplitude / static_cast<double>(r + 1);
            for (std::size_t j = 1; j <= kmax; ++j) {
                const double damp = row_amp / (1.0 + static_cast<double>(j * j));
                const Complex vv(unit() * damp, unit() * damp);
                const Complex rr(unit() * damp, unit() * damp);
                out.v[r * nx + j] = vv;
                out.v[r * nx + nx - j] = std::conj(vv);
                out.rho[r * nx + j] = rr;
                out.rho[r * nx + nx - j] = std::conj(rr);
            }
        }
        out.resolved["seed"] = seed;
        out.resolved["amplitude"] = amplitude;
        out.resolved["kmax"] = kmax;
    } else if (kind == "single-mode") {
        check_keys(*init, where, {"kind", "mode", "k_index", "v_amplitude", "rho_amplitude"});
        const std::size_t mode = need_count(*init, where, "mode");
        if (mode < 1 || mode > m)
            fail(ErrorCode::ConfigError, where + ": mode must lie in 1..modes");
        const std::size_t kj = get_count(*init, where, "k_index", 1);
        if (kj == 0 || kj > band)
            fail(ErrorCode::ConfigError,
                 where + ": k_index must lie in 1.." + std::to_string(band));
        const double va = get_number(*init, where, "v_amplitude", 1.0);
        const double ra = get_number(*init, where, "rho_amplitude", 0.0);
        // V = va cos(k x), rho = ra sin(k x)
        const std::size_t r = mode - 1;
        out.v[r * nx + kj] = Complex(0.5 * va, 0.0);
        out.v[r * nx + nx - kj] = Complex(0.5 * va, 0.0);
        out.rho[r * nx + kj] = Complex(0.0, -0.5 * ra);
        out.rho[r * nx + nx - kj] = Complex(0.0, 0.5 * ra);
        out.resolved["mode"] = mode;
        out.resolved["k_index"] = kj;
        out.resolved["v_amplitude"] = va;
        out.resolved["rho_amplitude"] = ra;
    } else {
        fail(ErrorCode::ConfigError,
             where + ": unknown kind \"" + kind + "\" (expected seeded-random or single-mode)");
    }
    return out;
}

void write_state_csv(const std::vector<Complex>& v, const std::vector<Complex>& rho,
                     std::size_t m, std::size_t nx, const fs::path& path) {
    CsvWriter csv({"mode", "k_index", "v_re", "v_im", "rho_re", "rho_im"});
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < nx; ++j) {
            const Complex vv = v[r * nx + j], rr = rho[r * nx + j];
            csv.add_mixed_row({std::to_string(r + 1), std::to_string(j),
                               format_double(vv.real()), format_double(vv.imag()),
                               format_double(rr.real()), format_double(rr.imag())});
        }
    csv.write(path.string());
}

int cmd_simulate(const ordered_json& cfg, const fs::path& out) {
    check_keys(cfg, "config",
               {"profile", "kind", "modes", "nx", "length", "dt", "t_end", "mu", "eps",
                "n2_ref", "initial", "snapshot_every"});
    const std::string kind = need_string(cfg, "config", "kind");
    if (kind != "linear-uncoupled" && kind != "linear-coupled" && kind != "nonlinear")
        fail(ErrorCode::ConfigError,
             "config: kind must be linear-uncoupled, linear-coupled, or nonlinear");

    BuiltProfile built = build_profile(cfg);
    const std::size_t m = need_count(cfg, "config", "modes");
    const std::size_t nx = need_count(cfg, "config", "nx");
    const double length = need_number(cfg, "config", "length");
    const double dt = need_number(cfg, "config", "dt");
    const double t_end = need_number(cfg, "config", "t_end");
    const double mu = get_number(cfg, "config", "mu", 1.0);
    const std::size_t every = get_count(cfg, "config", "snapshot_every", 10);
    if (dt <= 0.0) fail(ErrorCode::InvalidParams, "simulate: dt must be positive");
    if (t_end < dt) fail(ErrorCode::InvalidParams, "simulate: t_end must be at least dt");
    if (every == 0) fail(ErrorCode::InvalidParams, "simulate: snapshot_every must be positive");
    const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const double realized_t_end = static_cast<double>(steps) * dt;

    InitialData init = build_initial(cfg, m, nx);

    ordered_json resolved;
    resolved["profile"] = built.resolved;
    resolved["kind"] = kind;
    resolved["modes"] = m;
    resolved["nx"] = nx;
    resolved["length"] = length;
    resolved["dt"] = dt;
    resolved["t_end"] = t_end;
    resolved["mu"] = mu;
    resolved["snapshot_every"] = every;
    resolved["initial"] = init.resolved;

    ordered_json derived;
    derived["steps"] = steps;
    derived["realized_t_end"] = realized_t_end;

    if (kind == "nonlinear") {
        const double eps = need_number(cfg, "config", "eps");
        if (!built.bv.is_constant())
            fail(ErrorCode::InvalidParams,
                 "simulate nonlinear: the profile must have constant stratification");
        if (built.profile.variant != Variant::Boussinesq)
            fail(ErrorCode::InvalidParams,
                 "simulate nonlinear: the profile must be a Boussinesq variant");
        if (std::abs(built.profile.grid.depth - 1.0) > 1e-12)
            fail(ErrorCode::InvalidParams, "simulate nonlinear: the column depth must be 1");
        const double n_value = std::sqrt(built.bv.constant_value());

        NonlinearState state = make_nonlinear_state(m, nx, length, eps, mu, n_value);
        state.v = init.v;
        state.rho = init.rho;
        const InteractionTable table = build_interactions(m);

        std::vector<NonlinearState> snaps;
        snaps.push_back(state);
        for (std::size_t s = 1; s <= steps; ++s) {
            step_rk4(state, dt, table);
            if (s % every == 0 || s == steps) snaps.push_back(state);
        }

        const std::vector<ActivationRow> hist = mode_activation_history(snaps);
        std::vector<std::string> header{"time"};
        for (std::size_t r = 1; r <= m; ++r) header.push_back("v_norm_" + std::to_string(r));
        for (std::size_t r = 1; r <= m; ++r) header.push_back("rho_norm_" + std::to_string(r));
        CsvWriter activation(header);
        for (const ActivationRow& row : hist) {
            std::vector<double> cells{row.time};
            cells.insert(cells.end(), row.v_norm.begin(), row.v_norm.end());
            cells.insert(cells.end(), row.rho_norm.begin(), row.rho_norm.end());
            activation.add_row(cells);
        }
        activation.write((out / "activation.csv").string());
        write_state_csv(state.v, state.rho, m, nx, out / "final_state.csv");

        resolved["eps"] = eps;
        derived["n_value"] = n_value;
        derived["dropped_pairs"] = table.dropped;
        derived["dt_advisory_max"] = 0.5 * (length / static_cast<double>(nx)) /
                                     (n_value / kPi);
        derived["files"] = {"activation.csv", "final_state.csv"};
        write_manifest(out, "simulate", resolved, derived);
        return 0;
    }

    // linear kinds share the mode set and the energy time series
    ModeSet modes;
    std::string mode_source;
    if (built.profile.variant == Variant::Boussinesq && built.bv.is_constant()) {
        // closed forms keep the speeds bit-identical to the nonlinear reduction,
        // so eps = 0 runs of the two commands agree to stepper accuracy
        modes = explicit_boussinesq_modes(std::sqrt(built.bv.constant_value()),
                                          built.profile.grid.depth,
                                          built.profile.grid.size, m);
        mode_source = "closed-form constant-stratification basis";
    } else {
        modes = solve_modes(built.profile, built.bv, m);
        mode_source = "generalized eigensolve on the configured grid";
    }

    LinearState state(m, nx, length);
    state.v = init.v;
    state.rho = init.rho;

    CsvWriter energy_csv({"time", "energy"});
    double energy_first = 0.0, energy_last = 0.0;

    if (kind == "linear-uncoupled") {
        const double n2_default = built.bv.is_constant()
                                      ? built.bv.constant_value()
                                      : std::accumulate(built.bv.n2.begin(), built.bv.n2.end(),
                                                        0.0) /
                                            static_cast<double>(built.bv.n2.size());
        const double n2_ref = get_number(cfg, "config", "n2_ref", n2_default);
        const Dispersion disp{mu, n2_ref};
        energy_first = uncoupled_energy(state, modes, disp);
        energy_csv.add_row({0.0, energy_first});
        for (std::size_t s = 1; s <= steps; ++s) {
            step_uncoupled(state, modes, disp, dt);
            if (s % every == 0 || s == steps) {
                energy_last = uncoupled_energy(state, modes, disp);
                energy_csv.add_row({static_cast<double>(s) * dt, energy_last});
            }
        }
        resolved["n2_ref"] = n2_ref;
    } else {
        const std::vector<double> alpha = alpha_matrix(modes);
        const CoupledStepper stepper(modes, alpha, mu, nx, length, dt);
        energy_first = stepper.energy(state);
        energy_csv.add_row({0.0, energy_first});
        for (std::size_t s = 1; s <= steps; ++s) {
            stepper.step(state);
            if (s % every == 0 || s == steps) {
                energy_last = stepper.energy(state);
                energy_csv.add_row({static_cast<double>(s) * dt, energy_last});
            }
        }
    }

    energy_csv.write((out / "energy.csv").string());
    write_state_csv(state.v, state.rho, m, nx, out / "final_state.csv");

    derived["mode_source"] = mode_source;
    derived["energy_initial"] = energy_first;
    derived["energy_final"] = energy_last;
    derived["energy_drift"] = std::abs(energy_last - energy_first);
    derived["files"] = {"energy.csv", "final_state.csv"};
    write_manifest(out, "simulate", resolved, derived);
    return 0;
}

int cmd_sharp_limit(const ordered_json& cfg, const fs::path& out) {
    check_keys(cfg, "config", {"rho_plus", "rho_minus", "z0", "gravity", "deltas", "nz"});
    const double rho_plus = get_number(cfg, "config", "rho_plus", 2.0);
    const double rho_minus = get_number(cfg, "config", "rho_minus", 1.0);
    const double z0 = get_number(cfg, "config", "z0", -1.0 / 3.0);
    const double g = get_number(cfg, "config", "gravity", 1.0);
    const std::size_t nz = get_count(cfg, "config", "nz", 16385);

    std::vector<double> deltas{0.04, 0.02, 0.01, 0.005};
    if (const ordered_json* d = find(cfg, "deltas")) {
        if (!d->is_array() || d->empty())
            fail(ErrorCode::ConfigError, "config: \"deltas\" must be a non-empty array");
        deltas.clear();
        for (const auto& item : *d) {
            if (!item.is_number())
                fail(ErrorCode::ConfigError, "config: \"deltas\" entries must be numbers");
            deltas.push_back(item.get<double>());
        }
    }

    const SharpLimitReport report = delta_sweep(rho_plus, rho_minus, z0, g, deltas, nz);
    write_sharp_csv(report, (out / "sharp_report.csv").string());

    // shape dump subsampled for plotting; the report CSV keeps the exact errors
    const std::size_t stride = std::max<std::size_t>(1, report.z.size() / 2048);
    std::vector<std::string> header{"z", "fbar"};
    for (std::size_t i = 1; i <= deltas.size(); ++i) header.push_back("f_" + std::to_string(i));
    CsvWriter shapes(header);
    auto add_shape_row = [&](std::size_t i) {
        std::vector<double> cells{report.z[i], report.fbar[i]};
        for (const auto& shape : report.f_shapes) cells.push_back(shape[i]);
        shapes.add_row(cells);
    };
    std::size_t last_written = 0;
    for (std::size_t i = 0; i < report.z.size(); i += stride) {
        add_shape_row(i);
        last_written = i;
    }
    if (last_written + 1 != report.z.size()) add_shape_row(report.z.size() - 1);
    shapes.write((out / "shapes.csv").string());

    ordered_json resolved;
    resolved["rho_plus"] = rho_plus;
    resolved["rho_minus"] = rho_minus;
    resolved["z0"] = z0;
    resolved["gravity"] = g;
    resolved["deltas"] = deltas;
    resolved["nz"] = nz;
    ordered_json derived;
    derived["cbar"] = report.cbar;
    derived["c1_values"] = report.c1_values;
    derived["c1_sq_errors"] = report.c1_sq_errors;
    derived["sup_errors"] = report.sup_errors;
    derived["c1_sq_order"] = report.c1_sq_order;
    derived["f_sup_order"] = report.f_sup_order;
    derived["shape_stride"] = stride;
    derived["files"] = {"sharp_report.csv", "shapes.csv"};
    write_manifest(out, "sharp-limit", resolved, derived);
    return 0;
}

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::IoError:
            return 2;
        case ErrorCode::InvalidParams:
        case ErrorCode::StratificationUnstable:
        case ErrorCode::NonPositiveBuoyancy:
        case ErrorCode::GridError:
        case ErrorCode::ResolutionError:
        case ErrorCode::UnstableJump:
            return 3;
        default:
            return 4;
    }
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"vertical-mode decomposition toolkit for stratified columns", "strato"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    const std::pair<const char*, const char*> specs[] = {
        {"modes", "solve the vertical eigenproblem and write the basis"},
        {"mixing", "write modal coupling coefficients"},
        {"simulate", "run a linear or nonlinear modal evolution"},
        {"sharp-limit", "sweep smoothed two-layer profiles toward the interface limit"},
    };
    for (const auto& [name, blurb] : specs) {
        CLI::App* cmd = app.add_subcommand(name, blurb);
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        cmd->add_option("--out", out_dir, "output directory (default: current)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);  // prints help or the usage error
        return rc == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        const ordered_json cfg = load_config(config_path);
        const fs::path out(out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) fail(ErrorCode::IoError, "cannot create output directory " + out_dir);
        const std::string name = sub->get_name();
        if (name == "modes") return cmd_modes(cfg, out);
        if (name == "mixing") return cmd_mixing(cfg, out);
        if (name == "simulate") return cmd_simulate(cfg, out);
        return cmd_sharp_limit(cfg, out);
    } catch (const Error& e) {
        std::cerr << "strato " << sub->get_name() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "strato " << sub->get_name() << ": " << e.what() << "\n";
        return 4;
    }
}

}  // namespace strato
