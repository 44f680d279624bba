#include "strato/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strato/csv.hpp"

namespace strato {

const char* variant_name(Variant v) { return v == Variant::Full ? "full" : "boussinesq"; }

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::StratificationUnstable: return "StratificationUnstable";
        case ErrorCode::NonPositiveBuoyancy: return "NonPositiveBuoyancy";
        case ErrorCode::GridError: return "GridError";
        case ErrorCode::ResolutionError: return "ResolutionError";
        case ErrorCode::EigenFailure: return "EigenFailure";
        case ErrorCode::OperatorSingular: return "OperatorSingular";
        case ErrorCode::MassMatrixDegenerate: return "MassMatrixDegenerate";
        case ErrorCode::StepFailure: return "StepFailure";
        case ErrorCode::BlowupDetected: return "BlowupDetected";
        case ErrorCode::UnstableJump: return "UnstableJump";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

namespace bump {

double density(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / (x * (1.0 - x))) / raw_integral();
}

namespace {

double raw_density(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / (x * (1.0 - x)));
}

// d/dx of the normalized density; vanishes to all orders at 0 and 1.
double density_prime(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double s = x * (1.0 - x);
    return density(x) * (1.0 - 2.0 * x) / (s * s);
}

struct RampTable {
    static constexpr std::size_t kPoints = 65537;
    double h;
    std::vector<double> value;  // normalized cumulative integral at i*h

    RampTable() : h(1.0 / static_cast<double>(kPoints - 1)), value(kPoints) {
        // Cumulative trapezoid plus the h^2/12 end-derivative correction;
        // the integrand's derivatives vanish at x = 0, so only the moving
        // endpoint contributes.
        double acc = 0.0;
        double prev = raw_density(0.0);
        value[0] = 0.0;
        for (std::size_t i = 1; i < kPoints; ++i) {
            const double x = static_cast<double>(i) * h;
            const double cur = raw_density(x);
            acc += 0.5 * h * (prev + cur);
            value[i] = acc;
            prev = cur;
        }
        const double total = acc;
        for (std::size_t i = 0; i < kPoints; ++i) {
            const double x = static_cast<double>(i) * h;
            const double corrected = value[i] - (h * h / 12.0) * raw_prime(x);
            value[i] = corrected / total;
        }
        value.front() = 0.0;
        value.back() = 1.0;
    }

    static double raw_prime(double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        const double s = x * (1.0 - x);
        return raw_density(x) * (1.0 - 2.0 * x) / (s * s);
    }
};

const RampTable& ramp_table() {
    static const RampTable table;
    return table;
}

}  // namespace

double raw_integral() {
    static const double value = [] {
        constexpr std::size_t n = 1 << 17;
        const double h = 1.0 / static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t i = 1; i < n; ++i) sum += raw_density(static_cast<double>(i) * h);
        return sum * h;  // endpoint values are zero
    }();
    return value;
}

double ramp(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const RampTable& table = ramp_table();
    const double pos = x / table.h;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i >= RampTable::kPoints - 1) i = RampTable::kPoints - 2;
    const double x0 = static_cast<double>(i) * table.h;
    const double t = (x - x0) / table.h;
    const double y0 = table.value[i];
    const double y1 = table.value[i + 1];
    const double d0 = density(x0) * table.h;
    const double d1 = density(x0 + table.h) * table.h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1;
}

}  // namespace bump

namespace {

void validate_profile(const DensityProfile& profile) {
    const auto& rho = profile.rho;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
            fail(ErrorCode::InvalidParams, "density must be positive and finite");
    }
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
        if (!(rho[i + 1] < rho[i]))
            fail(ErrorCode::StratificationUnstable,
                 "density must decrease strictly with height (violated near z = " +
                     format_double(profile.grid.z[i]) + ")");
    }
    if (profile.variant == Variant::Full && !(profile.g > 0.0))
        fail(ErrorCode::InvalidParams, "gravity must be positive");
}

// Monotone cubic (Fritsch-Carlson) slopes for strictly increasing x.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& d, double xq) {
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (i >= x.size() - 1) i = x.size() - 2;
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y[i] + (t3 - 2.0 * t2 + t) * h * d[i] +
           (-2.0 * t3 + 3.0 * t2) * y[i + 1] + (t3 - t2) * h * d[i + 1];
}

}  // namespace

DensityProfile build_exponential(double rho0, double rate, double depth, double g,
                                 std::size_t grid_size, Variant variant) {
    if (!(rho0 > 0.0)) fail(ErrorCode::InvalidParams, "surface density must be positive");
    DensityProfile profile;
    profile.variant = variant;
    profile.g = g;
    profile.grid = VerticalGrid::uniform(depth, grid_size);
    profile.rho.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i)
        profile.rho[i] = rho0 * std::exp(-rate * profile.grid.z[i]);
    validate_profile(profile);
    return profile;
}

DensityProfile build_constant_n(double n_value, double rho0, double depth, double g,
                                std::size_t grid_size) {
    if (!(n_value > 0.0)) fail(ErrorCode::InvalidParams, "buoyancy frequency must be positive");
    if (!(g > 0.0)) fail(ErrorCode::InvalidParams, "gravity must be positive");
    return build_exponential(rho0, n_value * n_value / g, depth, g, grid_size, Variant::Full);
}

DensityProfile build_boussinesq_constant_n(double n_value, double rho0, double depth,
                                           std::size_t grid_size) {
    if (!(n_value > 0.0)) fail(ErrorCode::InvalidParams, "buoyancy frequency must be positive");
    if (!(rho0 > 0.0)) fail(ErrorCode::InvalidParams, "reference density must be positive");
    DensityProfile profile;
    profile.variant = Variant::Boussinesq;
    profile.g = 1.0;
    profile.grid = VerticalGrid::uniform(depth, grid_size);
    profile.rho.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i)
        profile.rho[i] = rho0 - n_value * n_value * profile.grid.z[i];
    validate_profile(profile);
    return profile;
}

DensityProfile build_smoothed_jump(double rho_plus, double rho_minus, double z0,
                                   double delta, double depth, double g,
                                   std::size_t grid_size, Variant variant) {
    if (!(rho_minus > 0.0)) fail(ErrorCode::InvalidParams, "upper-layer density must be positive");
    if (!(rho_plus > rho_minus))
        fail(ErrorCode::UnstableJump, "lower-layer density must exceed upper-layer density");
    if (!(delta > 0.0) || !(delta < depth))
        fail(ErrorCode::InvalidParams, "transition width must lie in (0, depth)");
    if (!(z0 > -depth) || !(z0 + delta < 0.0))
        fail(ErrorCode::InvalidParams, "transition layer [z0, z0+delta] must fit inside the column");
    DensityProfile profile;
    profile.variant = variant;
    profile.g = g;
    profile.grid = VerticalGrid::uniform(depth, grid_size);
    profile.rho.resize(grid_size);
    const double drop = rho_plus - rho_minus;
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double z = profile.grid.z[i];
        profile.rho[i] = rho_plus * std::exp(-delta * z) - drop * bump::ramp((z - z0) / delta);
    }
    validate_profile(profile);
    return profile;
}

DensityProfile build_tabulated(const std::vector<double>& z_samples,
                               const std::vector<double>& rho_samples, double depth,
                               double g, std::size_t grid_size, Variant variant) {
    const std::size_t n = z_samples.size();
    if (n < 4 || rho_samples.size() != n)
        fail(ErrorCode::InvalidParams, "tabulated profile needs >= 4 matched samples");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(z_samples[i + 1] > z_samples[i]))
            fail(ErrorCode::InvalidParams, "tabulated z samples must increase strictly");
    const double tol = 1e-9 * std::max(1.0, depth);
    if (std::abs(z_samples.front() + depth) > tol || std::abs(z_samples.back()) > tol)
        fail(ErrorCode::InvalidParams, "tabulated samples must span [-depth, 0]");

    DensityProfile profile;
    profile.variant = variant;
    profile.g = g;
    profile.grid = VerticalGrid::uniform(depth, grid_size);
    profile.rho.resize(grid_size);
    const auto slopes = pchip_slopes(z_samples, rho_samples);
    for (std::size_t i = 0; i < grid_size; ++i)
        profile.rho[i] = pchip_eval(z_samples, rho_samples, slopes, profile.grid.z[i]);
    profile.rho.front() = rho_samples.front();
    profile.rho.back() = rho_samples.back();
    validate_profile(profile);
    return profile;
}

DensityProfile build_tabulated_csv(const std::string& path, double depth, double g,
                                   std::size_t grid_size, Variant variant) {
    CsvTable table = read_numeric_csv(path);
    if (table.header.size() != 2)
        fail(ErrorCode::IoError, "profile CSV must have exactly columns z,rho: " + path);
    std::vector<double> z, rho;
    z.reserve(table.rows.size());
    rho.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        z.push_back(row[0]);
        rho.push_back(row[1]);
    }
    return build_tabulated(z, rho, depth, g, grid_size, variant);
}

BruntVaisala brunt_vaisala(const DensityProfile& profile) {
    const std::size_t n = profile.grid.size;
    const double h = profile.grid.dz;
    std::vector<double> v(n);
    if (profile.variant == Variant::Full) {
        for (std::size_t i = 0; i < n; ++i) v[i] = std::log(profile.rho[i]);
    } else {
        v = profile.rho;
    }
    const double scale = profile.variant == Variant::Full ? profile.g : 1.0;
    BruntVaisala result;
    result.grid = profile.grid;
    result.n2.resize(n);
    result.n2[0] = -scale * (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i)
        result.n2[i] = -scale * (v[i + 1] - v[i - 1]) / (2.0 * h);
    result.n2[n - 1] = -scale * (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(result.n2[i] > 0.0))
            fail(ErrorCode::NonPositiveBuoyancy,
                 "squared buoyancy frequency not positive at z = " +
                     format_double(profile.grid.z[i]));
    }
    return result;
}

bool BruntVaisala::is_constant(double rel_tol) const {
    const double mean = constant_value();
    for (double value : n2)
        if (std::abs(value - mean) > rel_tol * std::abs(mean)) return false;
    return true;
}

double BruntVaisala::constant_value() const {
    return std::accumulate(n2.begin(), n2.end(), 0.0) / static_cast<double>(n2.size());
}

}  // namespace strato
