#include "ranger21/problems/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ranger21/problems/loss.hpp"
#include "ranger21/problems/rng.hpp"
#include "ranger21/simd/kernels.hpp"

namespace ranger21::problems {
namespace {

void check_params(std::span<const ParamTensor> params, const MlpArch& arch) {
    const auto shapes = arch.param_shapes();
    if (params.size() != shapes.size()) {
        throw std::invalid_argument("mlp: expected " + std::to_string(shapes.size()) +
                                    " parameter tensors, got " + std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (params[i].shape() != shapes[i].second) {
            throw std::invalid_argument("mlp: parameter " + std::to_string(i) + " has shape " +
                                        shape_to_string(params[i].shape()) + ", expected " +
                                        shape_to_string(shapes[i].second));
        }
    }
}

void check_batch(const Batch& batch, const MlpArch& arch) {
    if (batch.size() == 0) {
        throw std::invalid_argument("mlp: empty batch");
    }
    if (batch.inputs.size() != batch.size() * arch.inputs) {
        throw std::invalid_argument("mlp: batch inputs do not match " + std::to_string(batch.size()) +
                                    " samples of width " + std::to_string(arch.inputs));
    }
}

// Whole-batch activations in feature-major layout [width x samples], so every
// inner loop is a long contiguous kernel call: pre[l] and post[l] for layer
// outputs l = 1..L; post[0] is the transposed input.
struct Activations {
    std::size_t samples;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;

    Activations(const MlpArch& arch, std::size_t n)
        : samples(n), pre(arch.layers() + 1), post(arch.layers() + 1) {
        for (std::size_t l = 0; l <= arch.layers(); ++l) {
            pre[l].resize(n * arch.width(l));
            post[l].resize(n * arch.width(l));
        }
    }

    std::span<double> pre_row(std::size_t l, std::size_t unit) {
        return std::span<double>(pre[l]).subspan(unit * samples, samples);
    }
    std::span<double> post_row(std::size_t l, std::size_t unit) {
        return std::span<double>(post[l]).subspan(unit * samples, samples);
    }
};

void forward(std::span<const ParamTensor> params, std::span<const double> x, const MlpArch& arch,
             Activations& act) {
    const auto& k = simd::kernels();
    const std::size_t n = act.samples;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < arch.inputs; ++i) {
            act.post[0][i * n + s] = x[s * arch.inputs + i];
        }
    }
    const std::size_t layers = arch.layers();
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = arch.width(l);
        const std::size_t out = arch.width(l + 1);
        const auto w = params[2 * l].values();
        const auto b = params[2 * l + 1].values();
        for (std::size_t o = 0; o < out; ++o) {
            auto z = act.pre_row(l + 1, o);
            std::fill(z.begin(), z.end(), 0.0);
            for (std::size_t i = 0; i < in; ++i) {
                k.axpy(w[o * in + i], act.post_row(l, i), z);
            }
            k.add_scalar(z, b[o]);
            auto h = act.post_row(l + 1, o);
            if (l + 1 == layers) {
                std::copy(z.begin(), z.end(), h.begin());
            } else if (arch.activation == Activation::Tanh) {
                std::transform(z.begin(), z.end(), h.begin(), [](double v) { return std::tanh(v); });
            } else {
                std::transform(z.begin(), z.end(), h.begin(), [](double v) { return v > 0.0 ? v : 0.0; });
            }
        }
    }
}

// Copies sample s's logits out of the feature-major output layer.
void gather_logits(const Activations& act, std::size_t layers, std::size_t classes, std::size_t s,
                   std::vector<double>& out) {
    for (std::size_t c = 0; c < classes; ++c) {
        out[c] = act.post[layers][c * act.samples + s];
    }
}

std::size_t argmax(std::span<const double> xs) {
    return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

}  // namespace

std::string_view activation_name(Activation a) {
    return a == Activation::Tanh ? "tanh" : "relu";
}

Activation parse_activation(std::string_view name) {
    if (name == "tanh") {
        return Activation::Tanh;
    }
    if (name == "relu") {
        return Activation::Relu;
    }
    throw std::invalid_argument("unknown activation '" + std::string(name) + "' (expected tanh or relu)");
}

std::size_t MlpArch::width(std::size_t i) const {
    if (i == 0) {
        return inputs;
    }
    if (i <= hidden.size()) {
        return hidden[i - 1];
    }
    return classes;
}

std::vector<std::pair<std::string, Shape>> MlpArch::param_shapes() const {
    std::vector<std::pair<std::string, Shape>> out;
    for (std::size_t l = 0; l < layers(); ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        out.emplace_back(prefix + ".weight", Shape{width(l + 1), width(l)});
        out.emplace_back(prefix + ".bias", Shape{width(l + 1)});
    }
    return out;
}

std::vector<ParamTensor> mlp_init(const MlpArch& arch, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ParamTensor> params;
    for (std::size_t l = 0; l < arch.layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(arch.width(l)));
        const std::string prefix = "layer" + std::to_string(l);
        const std::size_t out = arch.width(l + 1);
        std::vector<double> w(out * arch.width(l));
        for (double& x : w) {
            x = rng.uniform(-bound, bound);
        }
        std::vector<double> b(out);
        for (double& x : b) {
            x = rng.uniform(-bound, bound);
        }
        params.emplace_back(prefix + ".weight", Shape{out, arch.width(l)}, std::move(w));
        params.emplace_back(prefix + ".bias", Shape{out}, std::move(b));
    }
    return params;
}

MlpResult mlp_eval(std::span<const ParamTensor> params, const Batch& batch, const MlpArch& arch,
                   double label_smoothing) {
    check_params(params, arch);
    check_batch(batch, arch);
    const std::size_t layers = arch.layers();
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    std::vector<std::vector<double>> grads;
    grads.reserve(params.size());
    for (const auto& p : params) {
        grads.emplace_back(p.size(), 0.0);
    }

    const std::size_t n = batch.size();
    const auto& k = simd::kernels();
    Activations act(arch, n);
    forward(params, batch.inputs, arch, act);

    // delta[l] holds dLoss/dpre[l], feature-major like the activations.
    std::vector<std::vector<double>> delta(layers + 1);
    delta[layers].resize(n * arch.classes);
    std::vector<double> logits(arch.classes);
    std::vector<double> dlogits(arch.classes);
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        gather_logits(act, layers, arch.classes, s, logits);
        loss_sum += label_smoothed_ce_into(logits, batch.labels[s], label_smoothing, dlogits);
        for (std::size_t c = 0; c < arch.classes; ++c) {
            delta[layers][c * n + s] = dlogits[c] * inv_n;
        }
    }

    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = arch.width(l);
        const std::size_t out = arch.width(l + 1);
        const auto w = params[2 * l].values();
        auto& gw = grads[2 * l];
        auto& gb = grads[2 * l + 1];
        const auto d_out = [&](std::size_t o) {
            return std::span<const double>(delta[l + 1]).subspan(o * n, n);
        };
        for (std::size_t o = 0; o < out; ++o) {
            for (std::size_t i = 0; i < in; ++i) {
                gw[o * in + i] = k.dot(d_out(o), act.post_row(l, i));
            }
            gb[o] = k.sum(d_out(o));
        }
        if (l == 0) {
            break;
        }
        auto& d_in = delta[l];
        d_in.assign(n * in, 0.0);
        for (std::size_t i = 0; i < in; ++i) {
            auto di = std::span<double>(d_in).subspan(i * n, n);
            for (std::size_t o = 0; o < out; ++o) {
                k.axpy(w[o * in + i], d_out(o), di);
            }
            const auto z = act.pre_row(l, i);
            const auto h = act.post_row(l, i);
            for (std::size_t s = 0; s < n; ++s) {
                if (arch.activation == Activation::Tanh) {
                    di[s] *= 1.0 - h[s] * h[s];
                } else if (!(z[s] > 0.0)) {
                    di[s] = 0.0;
                }
            }
        }
    }

    MlpResult result;
    result.loss = loss_sum * inv_n;
    result.grads.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        result.grads.push_back(params[i].with_values(std::move(grads[i])));
    }
    return result;
}

MlpScore mlp_score(std::span<const ParamTensor> params, const Batch& batch, const MlpArch& arch,
                   double label_smoothing) {
    check_params(params, arch);
    check_batch(batch, arch);
    Activations act(arch, batch.size());
    forward(params, batch.inputs, arch, act);
    std::vector<double> logits(arch.classes);
    std::vector<double> scratch(arch.classes);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        gather_logits(act, arch.layers(), arch.classes, s, logits);
        loss_sum += label_smoothed_ce_into(logits, batch.labels[s], label_smoothing, scratch);
        correct += argmax(logits) == batch.labels[s] ? 1 : 0;
    }
    const double n = static_cast<double>(batch.size());
    return {loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace ranger21::problems
