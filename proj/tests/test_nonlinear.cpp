#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "strato/linear.hpp"
#include "strato/mixing.hpp"
#include "strato/modes.hpp"
#include "strato/nonlinear.hpp"

using namespace strato;

namespace {
constexpr double kPi = 3.14159265358979323846;

// conjugate-symmetric filler restricted to the dealias band, decaying in k
void fill_random(NonlinearState& s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t kmax = s.nx / 3;
    for (std::size_t r = 0; r < s.count; ++r) {
        s.v_at(r, 0) = unit(rng);
        s.rho_at(r, 0) = unit(rng);
        for (std::size_t j = 1; j <= kmax; ++j) {
            const double damp =
                1.0 / ((1.0 + static_cast<double>(j * j)) *
                       (1.0 + static_cast<double>(r)));
            const Complex av(damp * unit(rng), damp * unit(rng));
            const Complex ar(damp * unit(rng), damp * unit(rng));
            s.v_at(r, j) = av;
            s.v_at(r, s.nx - j) = std::conj(av);
            s.rho_at(r, j) = ar;
            s.rho_at(r, s.nx - j) = std::conj(ar);
        }
    }
}

double max_diff(const NonlinearState& a, const NonlinearState& b) {
    REQUIRE(a.v.size() == b.v.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        m = std::max(m, std::abs(a.v[i] - b.v[i]));
        m = std::max(m, std::abs(a.rho[i] - b.rho[i]));
    }
    return m;
}

double hermitian_defect(const NonlinearState& s) {
    double m = 0.0;
    for (std::size_t r = 0; r < s.count; ++r)
        for (std::size_t j = 0; j < s.nx; ++j) {
            const std::size_t jc = (s.nx - j) % s.nx;
            m = std::max(m, std::abs(s.v_at(r, j) - std::conj(s.v_at(r, jc))));
            m = std::max(m, std::abs(s.rho_at(r, j) - std::conj(s.rho_at(r, jc))));
        }
    return m;
}

}  // namespace

TEST_CASE("state construction") {
    auto s = make_nonlinear_state(3, 24, 2.0, 0.5, 0.25, kPi);
    CHECK(s.count == 3);
    CHECK(s.v.size() == 3 * 24);
    CHECK(s.mask == dealias_mask(24));
    for (const auto& z : s.v) CHECK(z == Complex(0.0, 0.0));
    CHECK(s.time == 0.0);

    // eps = 0 is the linear reduction and must be constructible
    CHECK(make_nonlinear_state(1, 8, 1.0, 0.0, 1.0, 1.0).eps == 0.0);
    CHECK(make_nonlinear_state(1, 8, 1.0, 1.0, 1.0, 1.0).eps == 1.0);

    CHECK_THROWS_AS(make_nonlinear_state(0, 24, 2.0, 0.5, 0.25, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 4, 2.0, 0.5, 0.25, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 24, 0.0, 0.5, 0.25, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 24, 2.0, -0.1, 0.25, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 24, 2.0, 1.5, 0.25, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 24, 2.0, 0.5, 0.0, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 24, 2.0, 0.5, 1.5, kPi), Error);
    CHECK_THROWS_AS(make_nonlinear_state(3, 24, 2.0, 0.5, 0.25, 0.0), Error);
}

TEST_CASE("interaction list matches the brute-force selection scan") {
    const std::size_t m = 6;
    auto table = build_interactions(m);
    auto modes = explicit_boussinesq_modes(2.0, 1.0, 513, m);

    for (std::size_t p = 1; p <= m; ++p)
        for (std::size_t q = 1; q <= m; ++q)
            for (std::size_t n = 1; n <= m; ++n) {
                const std::size_t diff = p > q ? p - q : q - p;
                const bool member = (p + q == n) || (diff == n);
                auto quad = beta_gamma_quadrature(p, q, n, modes);
                const bool quad_member =
                    std::abs(quad.beta) > 1e-10 || std::abs(quad.gamma) > 1e-10;
                CHECK(quad_member == member);

                std::size_t hits = 0;
                for (const auto& t : table.triples)
                    if (t.p == p && t.q == q && t.n == n) {
                        ++hits;
                        CHECK(std::abs(t.beta - quad.beta) < 1e-12);
                        CHECK(std::abs(t.gamma - quad.gamma) < 1e-12);
                    }
                CHECK(hits == (member ? 1u : 0u));
            }
}

TEST_CASE("linear reduction at eps zero") {
    SUBCASE("right-hand side equals the uncoupled linear one exactly") {
        auto s = make_nonlinear_state(3, 32, 2.0, 0.0, 0.7, kPi);
        fill_random(s, 11);
        auto table = build_interactions(3);
        auto rhs = nonlinear_rhs(s, table);
        auto kvec = wavenumbers(s.nx, s.length);
        for (std::size_t r = 0; r < s.count; ++r) {
            const double n_index = static_cast<double>(r + 1);
            const double cn = s.n_value / (n_index * kPi);
            for (std::size_t j = 0; j < s.nx; ++j) {
                const double k = kvec[j];
                const double denom =
                    1.0 + s.mu * k * k / (kPi * kPi * n_index * n_index);
                const Complex ev =
                    (Complex(0.0, 0.0) - Complex(0.0, k * cn) * s.rho_at(r, j)) / denom;
                const Complex er =
                    Complex(0.0, 0.0) - Complex(0.0, k * cn) * s.v_at(r, j);
                CHECK(rhs.v[r * s.nx + j] == ev);
                CHECK(rhs.rho[r * s.nx + j] == er);
            }
        }
    }

    SUBCASE("trajectory converges to the exact propagator at fourth order") {
        const std::size_t m = 3, nx = 32, nz = 257;
        const double length = 2.0, nval = kPi, t_final = 0.4;
        auto table = build_interactions(m);
        auto modes = explicit_boussinesq_modes(nval, 1.0, nz, m);
        const Dispersion disp{1.0, nval * nval};

        auto seed_state = make_nonlinear_state(m, nx, length, 0.0, 1.0, nval);
        fill_random(seed_state, 23);

        LinearState exact(m, nx, length);
        exact.v = seed_state.v;
        exact.rho = seed_state.rho;
        step_uncoupled(exact, modes, disp, t_final);

        double err[3];
        double dt = 0.04;
        for (int pass = 0; pass < 3; ++pass, dt *= 0.5) {
            auto s = seed_state;
            const auto steps = static_cast<std::size_t>(t_final / dt + 0.5);
            for (std::size_t i = 0; i < steps; ++i) step_rk4(s, dt, table);
            double e = 0.0;
            for (std::size_t i = 0; i < s.v.size(); ++i) {
                e = std::max(e, std::abs(s.v[i] - exact.v[i]));
                e = std::max(e, std::abs(s.rho[i] - exact.rho[i]));
            }
            err[pass] = e;
            CHECK(s.time == doctest::Approx(t_final).epsilon(1e-12));
        }
        const double order1 = std::log2(err[0] / err[1]);
        const double order2 = std::log2(err[1] / err[2]);
        CHECK(order1 > 3.8);
        CHECK(order1 < 4.2);
        CHECK(order2 > 3.8);
        CHECK(order2 < 4.2);
    }
}

TEST_CASE("single-mode data forces only its double") {
    // V_1 = cos(x), rho_1 = 0.7 sin(x) on length 2*pi, so k_1 = 1; the only
    // quadratic image of mode 1 is mode 2, whose transport forcing cancels
    // identically while the buoyancy forcing is the constant
    // -eps/sqrt(2) * 0.7 in x
    const std::size_t m = 4, nx = 64;
    const double eps = 0.1, length = 2.0 * kPi;
    auto s = make_nonlinear_state(m, nx, length, eps, 1.0, kPi);
    s.v_at(0, 1) = 0.5;
    s.v_at(0, nx - 1) = 0.5;
    s.rho_at(0, 1) = Complex(0.0, -0.35);
    s.rho_at(0, nx - 1) = Complex(0.0, 0.35);
    auto table = build_interactions(m);
    auto rhs = nonlinear_rhs(s, table);
    auto kvec = wavenumbers(nx, length);

    // mode 1 sees the pure linear terms: every partner mode is empty
    const double c1 = s.n_value / kPi;
    for (std::size_t j = 0; j < nx; ++j) {
        const double k = kvec[j];
        const double denom = 1.0 + k * k / (kPi * kPi);
        const Complex ev = (Complex(0.0, 0.0) - Complex(0.0, k * c1) * s.rho_at(0, j)) / denom;
        CHECK(std::abs(rhs.v[j] - ev) == 0.0);
    }

    // mode 2 transport: the (1,1) pair enters as a*b - b*a, exactly zero
    for (std::size_t j = 0; j < nx; ++j) CHECK(rhs.v[nx + j] == Complex(0.0, 0.0));

    // mode 2 buoyancy: constant forcing -eps/sqrt(2)*0.7 in the k = 0 bin only
    const double expected = -eps / std::sqrt(2.0) * 0.7;
    CHECK(std::abs(rhs.rho[nx + 0] - expected) < 1e-15);
    for (std::size_t j = 1; j < nx; ++j) CHECK(std::abs(rhs.rho[nx + j]) < 1e-16);

    // modes 3 and 4: all partners empty
    for (std::size_t r = 2; r < m; ++r)
        for (std::size_t j = 0; j < nx; ++j) {
            CHECK(rhs.v[r * nx + j] == Complex(0.0, 0.0));
            CHECK(rhs.rho[r * nx + j] == Complex(0.0, 0.0));
        }
}

TEST_CASE("reality and parity survive stepping") {
    SUBCASE("conjugate symmetry") {
        auto s = make_nonlinear_state(3, 48, 3.0, 0.3, 0.8, 2.0);
        fill_random(s, 47);
        auto table = build_interactions(3);
        for (int i = 0; i < 20; ++i) step_rk4(s, 0.01, table);
        CHECK(hermitian_defect(s) < 1e-13);
    }

    SUBCASE("odd transport, even buoyancy") {
        const std::size_t m = 3, nx = 48;
        auto s = make_nonlinear_state(m, nx, 2.0 * kPi, 0.4, 1.0, kPi);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t j = 1; j <= nx / 3; ++j) {
                const double damp = 1.0 / (1.0 + static_cast<double>(j * j));
                const Complex odd(0.0, damp * unit(rng));
                const double even = damp * unit(rng);
                s.v_at(r, j) = odd;
                s.v_at(r, nx - j) = std::conj(odd);
                s.rho_at(r, j) = even;
                s.rho_at(r, nx - j) = even;
            }
        auto table = build_interactions(m);
        for (int i = 0; i < 10; ++i) step_rk4(s, 0.01, table);
        double defect = 0.0;
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t j = 1; j < nx; ++j) {
                defect = std::max(defect, std::abs(s.v_at(r, j) + s.v_at(r, nx - j)));
                defect = std::max(defect,
                                  std::abs(s.rho_at(r, j) - s.rho_at(r, nx - j)));
                defect = std::max(defect, std::abs(s.v_at(r, j).real()));
                defect = std::max(defect, std::abs(s.rho_at(r, j).imag()));
            }
        defect = std::max(defect, std::abs(s.v_at(0, 0)));
        CHECK(defect < 1e-13);
    }
}

TEST_CASE("self-convergence at eps 0.1") {
    const std::size_t m = 4, nx = 64;
    const double length = 2.0 * kPi, t_final = 0.4;
    auto table = build_interactions(m);
    auto seed_state = make_nonlinear_state(m, nx, length, 0.1, 0.5, kPi);
    fill_random(seed_state, 31);

    auto run = [&](double dt) {
        auto s = seed_state;
        const auto steps = static_cast<std::size_t>(t_final / dt + 0.5);
        for (std::size_t i = 0; i < steps; ++i) step_rk4(s, dt, table);
        return s;
    };
    const auto reference = run(t_final / 512.0);
    const double e1 = max_diff(run(t_final / 32.0), reference);
    const double e2 = max_diff(run(t_final / 64.0), reference);
    const double e3 = max_diff(run(t_final / 128.0), reference);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
    CHECK(e2 / e3 > 12.0);
    CHECK(e2 / e3 < 20.0);
}

TEST_CASE("mode activation follows the coupling ladder") {
    // data in mode 1 only: V_1 = cos(x), rho_1 = 0. First order in eps puts
    // buoyancy into mode 2 at wavenumber zero with the closed-form amplitude
    //   rho_2(0, t) = -eps k a^2 sqrt(amp) (1 - cos(2 w t)) / (4 sqrt(2) w),
    // amp = 1 + mu k^2/pi^2 and w the mode-1 frequency; modes 3 and 4 enter
    // only at higher orders of eps.
    const std::size_t m = 4, nx = 64;
    const double length = 2.0 * kPi, eps = 0.1, mu = 1.0, nval = kPi;
    const double dt = 0.01;
    auto table = build_interactions(m);

    auto make_seed = [&](double e) {
        auto s = make_nonlinear_state(m, nx, length, e, mu, nval);
        s.v_at(0, 1) = 0.5;
        s.v_at(0, nx - 1) = 0.5;
        return s;
    };

    SUBCASE("eps = 0 leaves the other modes empty forever") {
        auto s = make_seed(0.0);
        std::vector<NonlinearState> traj{s};
        for (int i = 0; i < 100; ++i) {
            step_rk4(s, dt, table);
            if ((i + 1) % 25 == 0) traj.push_back(s);
        }
        auto hist = mode_activation_history(traj);
        CHECK(hist.size() == 5);
        for (const auto& row : hist) {
            REQUIRE(row.v_norm.size() == m);
            for (std::size_t r = 1; r < m; ++r) {
                CHECK(row.v_norm[r] == 0.0);
                CHECK(row.rho_norm[r] == 0.0);
            }
            CHECK(row.v_norm[0] > 0.1);
        }
        CHECK(hist.back().time == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("eps = 0.1 activates mode 2 at the predicted amplitude") {
        auto s = make_seed(eps);
        std::vector<NonlinearState> traj{s};
        for (int i = 0; i < 200; ++i) {
            step_rk4(s, dt, table);
            traj.push_back(s);
        }
        auto hist = mode_activation_history(traj);

        // start empty, end activated
        CHECK(hist.front().rho_norm[1] < 1e-12);
        CHECK(hist.back().rho_norm[1] > 1e-4);

        // mode 4 needs two intermediate interactions; it is still far down
        // at t = 0.05 (about 1.6e-8 already by t = 0.1)
        CHECK(hist[5].v_norm[3] < 1e-8);
        CHECK(hist[5].rho_norm[3] < 1e-8);

        // the ladder is ordered at t = 2
        const auto& last = hist.back();
        auto combined = [&](std::size_t r) {
            return std::hypot(last.v_norm[r], last.rho_norm[r]);
        };
        CHECK(combined(0) > combined(1));
        CHECK(combined(1) > combined(2));
        CHECK(combined(2) > combined(3));
        CHECK(combined(2) > 1e-8);

        // first-order closed form at t = 1 within 5 percent
        const double k1 = 1.0, a = 1.0;
        const double amp = 1.0 + mu * k1 * k1 / (kPi * kPi);
        const double omega = (nval / kPi) * k1 / std::sqrt(amp);
        const double predicted =
            eps * k1 * a * a * std::sqrt(amp) *
            (1.0 - std::cos(2.0 * omega * 1.0)) / (4.0 * std::sqrt(2.0) * omega);
        const double measured = hist[100].rho_norm[1] / std::sqrt(length);
        CHECK(hist[100].time == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(measured == doctest::Approx(std::abs(predicted)).epsilon(0.05));

        // the first-order forcing is constant in x: the k = 0 bin carries it
        double off_bin = 0.0;
        for (std::size_t j = 1; j < nx; ++j)
            off_bin = std::max(off_bin, std::abs(traj[100].rho_at(1, j)));
        CHECK(off_bin < 0.02 * std::abs(traj[100].rho_at(1, 0)));
    }
}

TEST_CASE("stepper plumbing") {
    SUBCASE("zero state stays zero") {
        auto s = make_nonlinear_state(2, 16, 1.0, 0.5, 0.5, 1.0);
        auto table = build_interactions(2);
        step_rk4(s, 0.05, table);
        for (const auto& z : s.v) CHECK(z == Complex(0.0, 0.0));
        for (const auto& z : s.rho) CHECK(z == Complex(0.0, 0.0));
        CHECK(s.time == 0.05);
    }

    SUBCASE("serial and parallel agree bitwise") {
        auto a = make_nonlinear_state(3, 48, 2.0, 0.6, 0.9, 2.5);
        fill_random(a, 77);
        auto b = a;
        auto table = build_interactions(3);
        auto ra = nonlinear_rhs(a, table, Exec::Serial);
        auto rb = nonlinear_rhs(b, table, Exec::Parallel);
        for (std::size_t i = 0; i < ra.v.size(); ++i) {
            CHECK(ra.v[i] == rb.v[i]);
            CHECK(ra.rho[i] == rb.rho[i]);
        }
        step_rk4(a, 0.02, table, Exec::Serial);
        step_rk4(b, 0.02, table, Exec::Parallel);
        CHECK(max_diff(a, b) == 0.0);
    }

    SUBCASE("blowup is detected and reported") {
        auto s = make_nonlinear_state(2, 32, 2.0 * kPi, 1.0, 1.0, kPi);
        s.v_at(0, 1) = 50.0;
        s.v_at(0, 31) = 50.0;
        s.rho_at(1, 2) = Complex(0.0, -40.0);
        s.rho_at(1, 30) = Complex(0.0, 40.0);
        auto table = build_interactions(2);
        bool caught = false;
        try {
            for (int i = 0; i < 100; ++i) step_rk4(s, 0.5, table);
        } catch (const Error& e) {
            caught = true;
            CHECK(e.code() == ErrorCode::BlowupDetected);
        }
        CHECK(caught);
    }

    SUBCASE("guards") {
        auto s = make_nonlinear_state(3, 16, 1.0, 0.5, 0.5, 1.0);
        auto table = build_interactions(3);
        CHECK_THROWS_AS(step_rk4(s, 0.0, table), Error);
        CHECK_THROWS_AS(step_rk4(s, -0.1, table), Error);
        CHECK_THROWS_AS(nonlinear_rhs(s, build_interactions(2)), Error);
        CHECK_THROWS_AS(nonlinear_rhs(s, build_interactions(4)), Error);
        auto broken = s;
        broken.mask.pop_back();
        CHECK_THROWS_AS(nonlinear_rhs(broken, table), Error);
    }
}
