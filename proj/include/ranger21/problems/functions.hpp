#pragma once

#include <span>
#include <vector>

namespace ranger21::problems {

struct ValueAndGradient {
    double value = 0.0;
    std::vector<double> gradient;
};

/// f(x) = (1 - x0)^2 + 100 (x1 - x0^2)^2 for a 2-vector x.
ValueAndGradient rosenbrock(std::span<const double> x);

/// f(x) = 1/2 sum a_i x_i^2 with a positive diagonal spectrum a.
ValueAndGradient quadratic(std::span<const double> x, std::span<const double> spectrum);

}  // namespace ranger21::problems
