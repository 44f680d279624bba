#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "strato/csv.hpp"
#include "strato/modes.hpp"

using namespace strato;

namespace {
constexpr double kPi = 3.14159265358979323846;

ModeSet solve_boussinesq(double n_value, std::size_t nz, std::size_t m) {
    auto profile = build_boussinesq_constant_n(n_value, 1.0, 1.0, nz);
    auto bv = brunt_vaisala(profile);
    return solve_modes(profile, bv, m);
}

std::size_t interior_sign_changes(const std::vector<double>& f) {
    std::size_t changes = 0;
    double prev = 0.0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        if (prev != 0.0 && f[i] * prev < 0.0) ++changes;
        if (f[i] != 0.0) prev = f[i];
    }
    return changes;
}
}  // namespace

TEST_CASE("constant-N Boussinesq speeds match both discrete and continuum closed forms") {
    const double n_value = kPi;
    const std::size_t nz = 1025;
    const double h = 1.0 / static_cast<double>(nz - 1);
    auto modes = solve_boussinesq(n_value, nz, 6);
    for (std::size_t n = 1; n <= 6; ++n) {
        // The conservative scheme's spectrum is known exactly:
        // c_n^h = N h / (2 sin(n pi h / 2)).
        const double discrete = n_value * h / (2.0 * std::sin(n * kPi * h / 2.0));
        CHECK(modes.speeds[n - 1] == doctest::Approx(discrete).epsilon(1e-12));
        // Continuum error has the sinc-expansion size (n pi h)^2 / 24.
        const double continuum = n_value / (static_cast<double>(n) * kPi);
        const double rel = std::abs(modes.speeds[n - 1] - continuum) / continuum;
        const double predicted = std::pow(n * kPi * h, 2) / 24.0;
        CHECK(rel > 0.8 * predicted);
        CHECK(rel < 1.2 * predicted);
    }
}

TEST_CASE("constant-N Boussinesq eigenfunctions match the sampled sine closed form") {
    const double n_value = kPi;
    const std::size_t nz = 513;
    auto modes = solve_boussinesq(n_value, nz, 4);
    auto exact = explicit_boussinesq_modes(n_value, 1.0, nz, 4);
    for (std::size_t n = 1; n <= 4; ++n) {
        double max_diff = 0.0;
        for (std::size_t i = 0; i < nz; ++i)
            max_diff = std::max(max_diff,
                                std::abs(modes.f[n - 1][i] - exact.f[n - 1][i]));
        // Discrete sines are exact eigenvectors here and the trapezoid norm of
        // the sampled sine is exactly the continuum one.
        CHECK(max_diff < 1e-10);
    }
}

TEST_CASE("full-variant constant-N speeds match the characteristic-equation closed form") {
    // rho = exp(-pi^2 z), g = 1: the eigenvalue problem reduces to
    // f'' - pi^2 f' + (pi^2/c^2) f = 0, giving c_n = 1/sqrt(n^2 + pi^2/4).
    std::vector<double> errors;
    for (std::size_t nz : {513u, 1025u}) {
        auto profile = build_constant_n(kPi, 1.0, 1.0, 1.0, nz);
        auto bv = brunt_vaisala(profile);
        auto modes = solve_modes(profile, bv, 4);
        double max_rel = 0.0;
        for (std::size_t n = 1; n <= 4; ++n) {
            const double exact = 1.0 / std::sqrt(static_cast<double>(n * n) + kPi * kPi / 4.0);
            max_rel = std::max(max_rel, std::abs(modes.speeds[n - 1] - exact) / exact);
        }
        errors.push_back(max_rel);
        CHECK(max_rel < 2e-4);
    }
    // Second-order convergence under grid doubling.
    const double ratio = errors[0] / errors[1];
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
}

TEST_CASE("solver output is orthonormal under its trapezoid weights") {
    SUBCASE("Boussinesq constant N") {
        auto modes = solve_boussinesq(2.0, 769, 8);
        CHECK(max_abs(orthonormality_residual(modes, Basis::FBasis)) < 1e-12);
        CHECK(max_abs(orthonormality_residual(modes, Basis::WeightedDual)) < 1e-12);
        auto g_res = orthonormality_residual(modes, Basis::GBasis);
        for (std::size_t i = 0; i < g_res.size(); ++i)
            CHECK(std::abs(g_res[i][i]) < 1e-13);  // renormalized diagonal
        // One-sided endpoint stencil leaves an O(h (n pi h)^2) wrinkle.
        CHECK(max_abs_offdiag(g_res) < 3.5e-6);
    }
    SUBCASE("full variant, smoothed two-layer profile") {
        auto profile = build_smoothed_jump(2.0, 1.0, -0.5, 0.2, 1.0, 1.0, 2049, Variant::Full);
        auto bv = brunt_vaisala(profile);
        auto modes = solve_modes(profile, bv, 6);
        // Floor set by the inverse-iteration residual over the spectral gap.
        CHECK(max_abs(orthonormality_residual(modes, Basis::FBasis)) < 1e-9);
        CHECK(max_abs(orthonormality_residual(modes, Basis::WeightedDual)) < 1e-9);
        auto g_res = orthonormality_residual(modes, Basis::GBasis);
        for (std::size_t i = 0; i < g_res.size(); ++i)
            CHECK(std::abs(g_res[i][i]) < 1e-13);
        CHECK(max_abs_offdiag(g_res) < 5e-5);
    }
}

TEST_CASE("explicit sampled modes are orthonormal to near round-off") {
    auto modes = explicit_boussinesq_modes(kPi, 1.0, 2048, 8);
    CHECK(max_abs(orthonormality_residual(modes, Basis::FBasis)) < 1e-13);
    CHECK(max_abs(orthonormality_residual(modes, Basis::GBasis)) < 1e-13);
    CHECK(max_abs(orthonormality_residual(modes, Basis::WeightedDual)) < 1e-13);
}

TEST_CASE("sign convention, node counts, and speed asymptotics") {
    auto profile = build_constant_n(kPi, 1.0, 1.0, 1.0, 1025);
    auto bv = brunt_vaisala(profile);
    auto modes = solve_modes(profile, bv, 8);
    for (std::size_t n = 1; n <= 8; ++n) {
        CHECK(modes.f[n - 1][1] > 0.0);
        CHECK(interior_sign_changes(modes.f[n - 1]) == n - 1);
        const double scaled = static_cast<double>(n) * modes.speeds[n - 1];
        CHECK(scaled > 0.4);  // n c_n stays in a band: c_n = O(1/n)
        CHECK(scaled < 1.05);
    }
    for (std::size_t n = 1; n < 8; ++n)
        CHECK(modes.speeds[n] < modes.speeds[n - 1]);
}

TEST_CASE("barotropic g_0 and derived-g normalization") {
    SUBCASE("Boussinesq: g_0 is constant 1/sqrt(depth)") {
        auto modes = solve_boussinesq(1.3, 257, 3);
        for (double value : modes.g[0]) CHECK(value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("full variant: g_0 proportional to 1/rho, unit weighted norm") {
        auto profile = build_constant_n(2.0, 1.2, 1.0, 1.0, 513);
        auto bv = brunt_vaisala(profile);
        auto modes = solve_modes(profile, bv, 3);
        const double norm = weighted_inner(modes.g[0], modes.g[0], modes.wg, modes.grid.dz);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < modes.grid.size; ++i)
            CHECK(modes.g[0][i] * modes.rho[i] ==
                  doctest::Approx(modes.alpha0).epsilon(1e-12));
    }
}

TEST_CASE("guards: resolution, mode count, grid mismatch") {
    auto profile = build_boussinesq_constant_n(1.0, 1.0, 1.0, 64);
    auto bv = brunt_vaisala(profile);
    CHECK_THROWS_AS(solve_modes(profile, bv, 17), Error);  // 17 > 64/4
    try {
        solve_modes(profile, bv, 17);
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ResolutionError);
    }
    auto other = build_boussinesq_constant_n(1.0, 1.0, 1.0, 65);
    auto bv_other = brunt_vaisala(other);
    CHECK_THROWS_AS(solve_modes(profile, bv_other, 4), Error);
}

TEST_CASE("CSV exports round-trip") {
    auto modes = solve_boussinesq(kPi, 129, 3);
    write_speeds_csv(modes, "test_speeds_tmp.csv");
    write_modes_csv(modes, "test_modes_tmp.csv");
    auto speeds = read_numeric_csv("test_speeds_tmp.csv");
    REQUIRE(speeds.header.size() == 2);
    REQUIRE(speeds.rows.size() == 3);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(speeds.rows[n][0] == static_cast<double>(n + 1));
        CHECK(speeds.rows[n][1] == modes.speeds[n]);  // 17 digits round-trip exactly
    }
    auto table = read_numeric_csv("test_modes_tmp.csv");
    REQUIRE(table.header.size() == 1 + 3 + 4);
    REQUIRE(table.rows.size() == 129);
    CHECK(table.rows[0][0] == -1.0);
    CHECK(table.rows[128][0] == 0.0);
    CHECK(table.rows[64][1] == modes.f[0][64]);
    std::remove("test_speeds_tmp.csv");
    std::remove("test_modes_tmp.csv");
}
