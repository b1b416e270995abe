#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranger21/problems/dataset.hpp"
#include "ranger21/problems/mlp.hpp"
#include "ranger21/problems/rng.hpp"
#include "ranger21/tensor.hpp"

namespace ranger21::problems {

struct Evaluation {
    double loss = 0.0;
    std::vector<ParamTensor> grads;
};

struct Metrics {
    double loss = 0.0;
    std::optional<double> accuracy;  // classification problems only
};

/// A differentiable objective the bench harness can optimize.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string_view name() const = 0;

    /// Starting parameters; deterministic in `seed`.
    virtual std::vector<ParamTensor> initial_params(std::uint64_t seed) const = 0;

    /// Number of samples minibatches are drawn from; 0 for analytic objectives.
    virtual std::size_t num_samples() const { return 0; }

    /// Loss and gradients on the given sample indices (all samples when empty).
    virtual Evaluation evaluate(std::span<const ParamTensor> params,
                                std::span<const std::size_t> batch = {}) const = 0;

    /// Full-objective loss and, when meaningful, accuracy.
    virtual Metrics metrics(std::span<const ParamTensor> params) const = 0;

    double loss(std::span<const ParamTensor> params) const { return metrics(params).loss; }
};

class RosenbrockProblem final : public Problem {
public:
    explicit RosenbrockProblem(std::vector<double> start = {-1.5, 2.0});

    std::string_view name() const override { return "rosenbrock"; }
    std::vector<ParamTensor> initial_params(std::uint64_t seed) const override;
    Evaluation evaluate(std::span<const ParamTensor> params,
                        std::span<const std::size_t> batch) const override;
    Metrics metrics(std::span<const ParamTensor> params) const override;

private:
    std::vector<double> start_;
};

class QuadraticProblem final : public Problem {
public:
    QuadraticProblem(std::vector<double> spectrum, std::vector<double> start);

    std::string_view name() const override { return "quadratic"; }
    std::vector<ParamTensor> initial_params(std::uint64_t seed) const override;
    Evaluation evaluate(std::span<const ParamTensor> params,
                        std::span<const std::size_t> batch) const override;
    Metrics metrics(std::span<const ParamTensor> params) const override;

private:
    std::vector<double> spectrum_;
    std::vector<double> start_;
};

/// MLP classifier on a fixed dataset with label-smoothed cross-entropy.
class MlpProblem final : public Problem {
public:
    MlpProblem(MlpArch arch, Dataset data, double label_smoothing);

    std::string_view name() const override { return "mlp"; }
    std::vector<ParamTensor> initial_params(std::uint64_t seed) const override;
    std::size_t num_samples() const override { return data_.size(); }
    Evaluation evaluate(std::span<const ParamTensor> params,
                        std::span<const std::size_t> batch) const override;
    Metrics metrics(std::span<const ParamTensor> params) const override;

    const MlpArch& arch() const noexcept { return arch_; }
    const Dataset& data() const noexcept { return data_; }

private:
    MlpArch arch_;
    Dataset data_;
    double label_smoothing_;
};

/// Epoch-wise shuffled minibatches; deterministic in the seed. A batch size
/// of 0 (or >= the sample count) means full batch every step.
class BatchSampler {
public:
    BatchSampler(std::size_t samples, std::size_t batch_size, std::uint64_t seed);

    /// Indices of the next minibatch (empty for full batch).
    std::span<const std::size_t> next();

private:
    std::size_t samples_;
    std::size_t batch_size_;
    std::size_t cursor_ = 0;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> batch_;
    Rng rng_;
};

}  // namespace ranger21::problems
