#pragma once

#include <cstddef>
#include <vector>

#include "strato/errors.hpp"

namespace strato {

// Uniform vertical grid on [-depth, 0], endpoints included.
struct VerticalGrid {
    double depth = 1.0;
    std::size_t size = 0;
    std::vector<double> z;  // ascending, z.front() == -depth, z.back() == 0
    double dz = 0.0;

    static VerticalGrid uniform(double depth, std::size_t size);

    bool same_as(const VerticalGrid& other, double tol = 1e-12) const;
};

// Trapezoidal quadrature of samples on a uniform grid.
double trapezoid(const std::vector<double>& values, double dz);

// Trapezoidal inner product with a pointwise weight; all vectors share the grid.
double weighted_inner(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<double>& weight, double dz);

}  // namespace strato
