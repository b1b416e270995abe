#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ranger21/tensor.hpp"

namespace ranger21::problems {

using ScalarObjective = std::function<double(std::span<const ParamTensor>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every
/// coordinate of every tensor. Gradients carry the parameters' names and shapes.
std::vector<ParamTensor> finite_diff_grad(const ScalarObjective& f,
                                          std::span<const ParamTensor> params, double h);

}  // namespace ranger21::problems
