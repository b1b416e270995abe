#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ranger21/tensor.hpp"

namespace ranger21::problems {

enum class Activation { Tanh, Relu };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected classifier: inputs -> hidden... -> classes, with the
/// activation after every hidden layer and no normalization layers.
struct MlpArch {
    std::size_t inputs = 1;
    std::vector<std::size_t> hidden;
    std::size_t classes = 2;
    Activation activation = Activation::Tanh;

    std::size_t layers() const noexcept { return hidden.size() + 1; }
    std::size_t width(std::size_t i) const;  // 0 = inputs, layers() = classes

    /// Parameter shapes in registration order: layer{i}.weight [out, in],
    /// layer{i}.bias [out].
    std::vector<std::pair<std::string, Shape>> param_shapes() const;
};

/// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
std::vector<ParamTensor> mlp_init(const MlpArch& arch, std::uint64_t seed);

/// Row-major sample matrix and labels.
struct Batch {
    std::span<const double> inputs;  // n x arch.inputs
    std::span<const std::size_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
};

struct MlpResult {
    double loss = 0.0;  // mean label-smoothed cross-entropy
    std::vector<ParamTensor> grads;
};

/// Forward pass plus manual backpropagation; exact gradients of the batch-mean loss.
MlpResult mlp_eval(std::span<const ParamTensor> params, const Batch& batch, const MlpArch& arch,
                   double label_smoothing);

struct MlpScore {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Forward pass only: mean loss and argmax accuracy.
MlpScore mlp_score(std::span<const ParamTensor> params, const Batch& batch, const MlpArch& arch,
                   double label_smoothing);

}  // namespace ranger21::problems
