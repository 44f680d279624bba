#include "strato/sharp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strato/csv.hpp"
#include "strato/errors.hpp"
#include "strato/modes.hpp"
#include "strato/profile.hpp"

namespace strato {

namespace {

void check_layers(double rho_plus, double rho_minus, double z0, double g,
                  const char* where) {
    const std::string tag(where);
    if (!(rho_minus > 0.0))
        fail(ErrorCode::InvalidParams, tag + ": densities must be positive");
    if (!(z0 > -1.0 && z0 < 0.0))
        fail(ErrorCode::InvalidParams, tag + ": interface must lie inside (-1, 0)");
    if (!(g > 0.0)) fail(ErrorCode::InvalidParams, tag + ": gravity must be positive");
    if (!(rho_plus > rho_minus))
        fail(ErrorCode::UnstableJump, tag + ": lower layer must be denser");
}

// shared linear interpolation estimator at z0 so the peak matching treats
// the computed and the limit shape identically
double value_at(const std::vector<double>& samples, const VerticalGrid& grid,
                double z0) {
    const double pos = (z0 + grid.depth) / grid.dz;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= grid.size) i = grid.size - 2;
    const double t = pos - static_cast<double>(i);
    return (1.0 - t) * samples[i] + t * samples[i + 1];
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t from) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size() - from);
    for (std::size_t i = from; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double limit_speed(double rho_plus, double rho_minus, double z0, double g) {
    check_layers(rho_plus, rho_minus, z0, g, "limit_speed");
    const double harmonic = rho_plus / (z0 + 1.0) + rho_minus / (-z0);
    return std::sqrt((rho_plus - rho_minus) * g / harmonic);
}

std::vector<double> limit_eigenfunction(double rho_plus, double rho_minus, double z0,
                                        double g, const std::vector<double>& z_grid) {
    check_layers(rho_plus, rho_minus, z0, g, "limit_eigenfunction");
    const double a = 1.0 / (std::sqrt((rho_plus - rho_minus) * g) * (z0 + 1.0));
    const double upper_slope = a * (1.0 + z0) / z0;
    std::vector<double> out(z_grid.size());
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        const double z = z_grid[i];
        out[i] = z <= z0 ? a * (z + 1.0) : upper_slope * z;
    }
    return out;
}

SharpLimitReport delta_sweep(double rho_plus, double rho_minus, double z0, double g,
                             const std::vector<double>& deltas, std::size_t grid_size,
                             Exec exec) {
    check_layers(rho_plus, rho_minus, z0, g, "delta_sweep");
    if (deltas.empty()) fail(ErrorCode::InvalidParams, "delta_sweep: empty delta list");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0))
            fail(ErrorCode::InvalidParams, "delta_sweep: deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            fail(ErrorCode::InvalidParams, "delta_sweep: deltas must decrease strictly");
    }
    if (grid_size < 9) fail(ErrorCode::InvalidParams, "delta_sweep: grid too small");
    const double dz = 1.0 / static_cast<double>(grid_size - 1);
    if (dz > deltas.back() / 8.0)
        fail(ErrorCode::ResolutionError,
             "delta_sweep: transition layer under-resolved, need spacing <= delta/8");

    SharpLimitReport report;
    report.delta_values = deltas;
    report.cbar = limit_speed(rho_plus, rho_minus, z0, g);

    for (double delta : deltas) {
        auto profile = build_smoothed_jump(rho_plus, rho_minus, z0, delta, 1.0, g,
                                           grid_size, Variant::Full);
        auto bv = brunt_vaisala(profile);
        auto modes = solve_modes(profile, bv, 1, exec);
        const double c1 = modes.speeds[0];

        if (report.z.empty()) {
            report.z = modes.grid.z;
            auto fbar = limit_eigenfunction(rho_plus, rho_minus, z0, g, report.z);
            const double peak = value_at(fbar, modes.grid, z0);
            for (double& v : fbar) v /= peak;
            report.fbar = std::move(fbar);
        }

        std::vector<double> shape = modes.f[0];
        const double peak = value_at(shape, modes.grid, z0);
        if (!(std::abs(peak) > 0.0))
            fail(ErrorCode::EigenFailure, "delta_sweep: vanishing eigenfunction at z0");
        for (double& v : shape) v /= peak;

        double sup = 0.0;
        for (std::size_t i = 0; i < shape.size(); ++i)
            sup = std::max(sup, std::abs(shape[i] - report.fbar[i]));

        report.c1_values.push_back(c1);
        report.c1_sq_errors.push_back(std::abs(c1 * c1 - report.cbar * report.cbar));
        report.sup_errors.push_back(sup);
        report.f_shapes.push_back(std::move(shape));
    }

    const std::size_t n = deltas.size();
    if (n >= 2) {
        std::size_t from = n / 2;
        if (n - from < 2) from = n - 2;
        std::vector<double> lx(n), lc(n), lf(n);
        for (std::size_t i = 0; i < n; ++i) {
            lx[i] = std::log(deltas[i]);
            lc[i] = std::log(std::max(report.c1_sq_errors[i], 1e-300));
            lf[i] = std::log(std::max(report.sup_errors[i], 1e-300));
        }
        report.c1_sq_order = lsq_slope(lx, lc, from);
        report.f_sup_order = lsq_slope(lx, lf, from);
    }
    return report;
}

void write_sharp_csv(const SharpLimitReport& report, const std::string& path) {
    CsvWriter csv({"delta", "c1", "c1_sq_err", "f_sup_err"});
    for (std::size_t i = 0; i < report.delta_values.size(); ++i)
        csv.add_row({report.delta_values[i], report.c1_values[i],
                     report.c1_sq_errors[i], report.sup_errors[i]});
    csv.write(path);
}

}  // namespace strato
