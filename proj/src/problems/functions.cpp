#include "ranger21/problems/functions.hpp"

#include <stdexcept>

namespace ranger21::problems {

ValueAndGradient rosenbrock(std::span<const double> x) {
    if (x.size() != 2) {
        throw std::invalid_argument("rosenbrock expects a 2-vector");
    }
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return {
        a * a + 100.0 * b * b,
        {-2.0 * a - 400.0 * x[0] * b, 200.0 * b},
    };
}

ValueAndGradient quadratic(std::span<const double> x, std::span<const double> spectrum) {
    if (x.size() != spectrum.size()) {
        throw std::invalid_argument("quadratic: spectrum and point differ in length");
    }
    ValueAndGradient out{0.0, std::vector<double>(x.size())};
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(spectrum[i] > 0.0)) {
            throw std::invalid_argument("quadratic: spectrum entries must be positive");
        }
        out.value += 0.5 * spectrum[i] * x[i] * x[i];
        out.gradient[i] = spectrum[i] * x[i];
    }
    return out;
}

}  // namespace ranger21::problems
