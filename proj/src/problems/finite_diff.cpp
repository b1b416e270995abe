#include "ranger21/problems/finite_diff.hpp"

#include <stdexcept>

namespace ranger21::problems {

std::vector<ParamTensor> finite_diff_grad(const ScalarObjective& f,
                                          std::span<const ParamTensor> params, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite_diff_grad: h must be positive");
    }
    std::vector<ParamTensor> probe(params.begin(), params.end());
    std::vector<ParamTensor> grads;
    grads.reserve(params.size());
    for (std::size_t p = 0; p < probe.size(); ++p) {
        std::vector<double> g(probe[p].size());
        auto values = probe[p].mutable_values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double x = values[i];
            values[i] = x + h;
            const double up = f(probe);
            values[i] = x - h;
            const double down = f(probe);
            values[i] = x;
            g[i] = (up - down) / (2.0 * h);
        }
        grads.push_back(params[p].with_values(std::move(g)));
    }
    return grads;
}

}  // namespace ranger21::problems
