#include "ranger21/problems/problem.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "ranger21/problems/functions.hpp"

namespace ranger21::problems {
namespace {

std::span<const double> single_vector(std::span<const ParamTensor> params, std::size_t n,
                                      const char* who) {
    if (params.size() != 1 || params[0].size() != n) {
        throw std::invalid_argument(std::string(who) + ": expects one parameter tensor of " +
                                    std::to_string(n) + " elements");
    }
    return params[0].values();
}

}  // namespace

RosenbrockProblem::RosenbrockProblem(std::vector<double> start) : start_(std::move(start)) {
    if (start_.size() != 2) {
        throw std::invalid_argument("rosenbrock: start must be a 2-vector");
    }
}

std::vector<ParamTensor> RosenbrockProblem::initial_params(std::uint64_t) const {
    return {ParamTensor("x", {2}, start_)};
}

Evaluation RosenbrockProblem::evaluate(std::span<const ParamTensor> params,
                                       std::span<const std::size_t>) const {
    auto r = rosenbrock(single_vector(params, 2, "rosenbrock"));
    return {r.value, {params[0].with_values(std::move(r.gradient))}};
}

Metrics RosenbrockProblem::metrics(std::span<const ParamTensor> params) const {
    return {rosenbrock(single_vector(params, 2, "rosenbrock")).value, std::nullopt};
}

QuadraticProblem::QuadraticProblem(std::vector<double> spectrum, std::vector<double> start)
    : spectrum_(std::move(spectrum)), start_(std::move(start)) {
    if (spectrum_.empty() || spectrum_.size() != start_.size()) {
        throw std::invalid_argument("quadratic: spectrum and start must be non-empty and equal length");
    }
    for (double a : spectrum_) {
        if (!(a > 0.0)) {
            throw std::invalid_argument("quadratic: spectrum entries must be positive");
        }
    }
}

std::vector<ParamTensor> QuadraticProblem::initial_params(std::uint64_t) const {
    return {ParamTensor("x", {start_.size()}, start_)};
}

Evaluation QuadraticProblem::evaluate(std::span<const ParamTensor> params,
                                      std::span<const std::size_t>) const {
    auto r = quadratic(single_vector(params, spectrum_.size(), "quadratic"), spectrum_);
    return {r.value, {params[0].with_values(std::move(r.gradient))}};
}

Metrics QuadraticProblem::metrics(std::span<const ParamTensor> params) const {
    return {quadratic(single_vector(params, spectrum_.size(), "quadratic"), spectrum_).value,
            std::nullopt};
}

MlpProblem::MlpProblem(MlpArch arch, Dataset data, double label_smoothing)
    : arch_(std::move(arch)), data_(std::move(data)), label_smoothing_(label_smoothing) {
    if (data_.dims != arch_.inputs) {
        throw std::invalid_argument("mlp problem: dataset has " + std::to_string(data_.dims) +
                                    " features but the network expects " +
                                    std::to_string(arch_.inputs));
    }
    if (data_.classes != arch_.classes) {
        throw std::invalid_argument("mlp problem: dataset has " + std::to_string(data_.classes) +
                                    " classes but the network outputs " +
                                    std::to_string(arch_.classes));
    }
    if (!(label_smoothing_ >= 0.0 && label_smoothing_ < 1.0)) {
        throw std::invalid_argument("mlp problem: label smoothing must lie in [0, 1)");
    }
}

std::vector<ParamTensor> MlpProblem::initial_params(std::uint64_t seed) const {
    return mlp_init(arch_, seed);
}

Evaluation MlpProblem::evaluate(std::span<const ParamTensor> params,
                                std::span<const std::size_t> batch) const {
    if (batch.empty()) {
        auto r = mlp_eval(params, Batch{data_.inputs, data_.labels}, arch_, label_smoothing_);
        return {r.loss, std::move(r.grads)};
    }
    std::vector<double> inputs;
    std::vector<std::size_t> labels;
    inputs.reserve(batch.size() * data_.dims);
    labels.reserve(batch.size());
    for (std::size_t idx : batch) {
        if (idx >= data_.size()) {
            throw std::out_of_range("mlp problem: sample index " + std::to_string(idx) + " out of range");
        }
        const auto row = std::span<const double>(data_.inputs).subspan(idx * data_.dims, data_.dims);
        inputs.insert(inputs.end(), row.begin(), row.end());
        labels.push_back(data_.labels[idx]);
    }
    auto r = mlp_eval(params, Batch{inputs, labels}, arch_, label_smoothing_);
    return {r.loss, std::move(r.grads)};
}

Metrics MlpProblem::metrics(std::span<const ParamTensor> params) const {
    const auto s = mlp_score(params, Batch{data_.inputs, data_.labels}, arch_, label_smoothing_);
    return {s.loss, s.accuracy};
}

BatchSampler::BatchSampler(std::size_t samples, std::size_t batch_size, std::uint64_t seed)
    : samples_(samples), batch_size_(batch_size), order_(samples), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    cursor_ = samples_;  // forces a shuffle on the first call
}

std::span<const std::size_t> BatchSampler::next() {
    if (batch_size_ == 0 || batch_size_ >= samples_) {
        return {};
    }
    if (cursor_ + batch_size_ > samples_) {
        rng_.shuffle(std::span<std::size_t>(order_));
        cursor_ = 0;
    }
    batch_.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                  order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_size_));
    cursor_ += batch_size_;
    return batch_;
}

}  // namespace ranger21::problems
