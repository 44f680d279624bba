#include "strato/grid.hpp"

#include <cmath>

namespace strato {

VerticalGrid VerticalGrid::uniform(double depth, std::size_t size) {
    if (!(depth > 0.0) || !std::isfinite(depth))
        fail(ErrorCode::InvalidParams, "depth must be positive and finite");
    if (size < 9) fail(ErrorCode::InvalidParams, "grid needs at least 9 points");
    VerticalGrid grid;
    grid.depth = depth;
    grid.size = size;
    grid.dz = depth / static_cast<double>(size - 1);
    grid.z.resize(size);
    for (std::size_t i = 0; i < size; ++i)
        grid.z[i] = -depth + static_cast<double>(i) * grid.dz;
    grid.z.front() = -depth;
    grid.z.back() = 0.0;
    return grid;
}

bool VerticalGrid::same_as(const VerticalGrid& other, double tol) const {
    return size == other.size && std::abs(depth - other.depth) <= tol * depth &&
           std::abs(dz - other.dz) <= tol * dz;
}

double trapezoid(const std::vector<double>& values, double dz) {
    if (values.size() < 2) fail(ErrorCode::GridError, "trapezoid needs at least 2 samples");
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * dz;
}

double weighted_inner(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<double>& weight, double dz) {
    const std::size_t n = a.size();
    if (b.size() != n || weight.size() != n)
        fail(ErrorCode::GridError, "inner product operands on mismatched grids");
    double sum = 0.5 * (a[0] * b[0] * weight[0] + a[n - 1] * b[n - 1] * weight[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) sum += a[i] * b[i] * weight[i];
    return sum * dz;
}

}  // namespace strato
