#include "ranger21/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "ranger21/simd/kernels.hpp"

namespace ranger21 {
namespace {

void check_alignment(std::span<const ParamTensor> params, std::span<const ParamTensor> grads,
                     const OptimizerState& state) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("optimizer step: " + std::to_string(params.size()) +
                                    " parameters but " + std::to_string(grads.size()) +
                                    " gradients");
    }
    if (state.moments.size() != params.size()) {
        throw std::invalid_argument("optimizer step: state tracks " +
                                    std::to_string(state.moments.size()) + " tensors, expected " +
                                    std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        require_same_shape(params[i], grads[i], "optimizer step");
        if (state.moments[i].size() != params[i].size()) {
            throw std::invalid_argument("optimizer step: state for '" + params[i].name() +
                                        "' does not match its size");
        }
    }
}

// Scratch space for one tensor's intermediates within a step.
struct Scratch {
    std::vector<double> grad;
    std::vector<double> update;
    std::vector<double> v_hat;
    std::vector<double> decay;

    explicit Scratch(std::span<const double> g)
        : grad(g.begin(), g.end()), update(g.size()), v_hat(g.size()), decay(g.size()) {}
};

TensorDiagnostics describe(const ParamTensor& p, const Scratch& s, double decay_coeff,
                           const ClipStats& clip) {
    TensorDiagnostics d;
    d.name = p.name();
    d.grad = s.grad;
    d.update = s.update;
    d.v_hat = s.v_hat;
    d.decay = s.decay;
    d.mean_v_hat = simd::kernels().sum(s.v_hat) / static_cast<double>(s.v_hat.size());
    d.decay_coeff = decay_coeff;
    d.clip = clip;
    return d;
}

}  // namespace

std::string_view preset_name(Preset p) {
    switch (p) {
        case Preset::AdamW:
            return "adamw";
        case Preset::Ranger21:
            return "ranger21";
    }
    return "unknown";
}

Preset parse_preset(std::string_view name) {
    if (name == "adamw") {
        return Preset::AdamW;
    }
    if (name == "ranger21") {
        return Preset::Ranger21;
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected adamw or ranger21)");
}

Ranger21Config Ranger21Config::defaults(double eta, std::int64_t t_max) {
    Ranger21Config cfg;
    cfg.schedule = ScheduleSpec::with_defaults(eta, cfg.moments.beta2, t_max);
    return cfg;
}

void Ranger21Config::validate() const {
    schedule.validate();
    moments.validate();
    decay().validate();
    clip.validate();
    if (schedule.beta2 != moments.beta2) {
        throw std::invalid_argument("schedule beta2 must equal the second-moment beta2");
    }
    if (k_lookahead < 1) {
        throw std::invalid_argument("k_lookahead must be >= 1, got " + std::to_string(k_lookahead));
    }
    if (!(beta_lookahead >= 0.0 && beta_lookahead < 1.0)) {
        throw std::invalid_argument("beta_lookahead must lie in [0, 1)");
    }
}

AdamWConfig AdamWConfig::from(const Ranger21Config& cfg) {
    return AdamWConfig{
        .eta = cfg.schedule.eta,
        .weight_decay = cfg.weight_decay,
        .beta1 = cfg.moments.beta1,
        .beta2 = cfg.moments.beta2,
        .eps = cfg.moments.eps,
    };
}

void AdamWConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("learning rate must be a finite positive number");
    }
    MomentConfig{0.0, beta1, beta2, eps}.validate();
    DecayConfig{weight_decay, false, false}.validate();
}

LookaheadState LookaheadState::init(std::span<const ParamTensor> params) {
    LookaheadState s;
    s.slow_weights.reserve(params.size());
    for (const auto& p : params) {
        s.slow_weights.emplace_back(p.values().begin(), p.values().end());
    }
    return s;
}

OptimizerState OptimizerState::init(std::span<const ParamTensor> params) {
    OptimizerState s;
    s.moments.reserve(params.size());
    for (const auto& p : params) {
        s.moments.emplace_back(p.size());
    }
    s.lookahead = LookaheadState::init(params);
    return s;
}

void adamw_step(std::span<ParamTensor> params, std::span<const ParamTensor> grads,
                OptimizerState& state, std::int64_t t, const AdamWConfig& cfg,
                const StepObserver* observer) {
    check_alignment(params, grads, state);
    if (t < 1) {
        throw std::invalid_argument("adamw_step: t must be >= 1, got " + std::to_string(t));
    }
    const MomentConfig moments{0.0, cfg.beta1, cfg.beta2, cfg.eps};
    const DecayConfig decay{cfg.weight_decay, false, false};
    const auto& k = simd::kernels();

    StepDiagnostics diag;
    std::vector<Scratch> kept;
    if (observer != nullptr) {
        diag.t = t;
        diag.eta_t = cfg.eta;
        kept.reserve(params.size());
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        Scratch s(grads[i].values());
        adam_update_into(state.moments[i], s.grad, t, moments, s.update, s.v_hat);
        const double coeff = combined_decay_into(params[i].values(), s.v_hat, 1.0, decay, s.decay);
        k.apply_update(params[i].mutable_values(), s.update, s.decay, cfg.eta);
        if (observer != nullptr) {
            kept.push_back(std::move(s));
            diag.tensors.push_back(describe(params[i], kept.back(), coeff, ClipStats{}));
        }
    }
    state.steps = t;
    if (observer != nullptr) {
        (*observer)(diag);
    }
}

void ranger21_step(std::span<ParamTensor> params, std::span<const ParamTensor> grads,
                   OptimizerState& state, std::int64_t t, const Ranger21Config& cfg,
                   const StepObserver* observer) {
    check_alignment(params, grads, state);
    if (t < 1 || t > cfg.schedule.t_max) {
        throw std::out_of_range("ranger21_step: t=" + std::to_string(t) + " outside [1, " +
                                std::to_string(cfg.schedule.t_max) + "]");
    }
    const Toggles& on = cfg.toggles;
    const DecayConfig decay = cfg.decay();
    const auto& k = simd::kernels();

    double factor = 1.0;
    if (on.warmup) {
        factor = std::min(factor, warmup_factor(t, cfg.schedule));
    }
    if (on.warmdown) {
        factor = std::min(factor, warmdown_factor(t, cfg.schedule));
    }
    const double eta_t = factor * cfg.schedule.eta;

    StepDiagnostics diag;
    std::vector<Scratch> kept;
    if (observer != nullptr) {
        diag.t = t;
        diag.eta_t = eta_t;
        kept.reserve(params.size());
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        ParamTensor& theta = params[i];
        Scratch s(grads[i].values());
        ClipStats clip;
        if (on.agc) {
            clip = adaptive_gradient_clip_in_place(s.grad, theta.values(), theta.shape(), cfg.clip);
        }
        if (on.centralization) {
            gradient_centralize_in_place(s.grad, theta.shape());
        }
        if (on.pnm) {
            pnm_update_into(state.moments[i], s.grad, t, cfg.moments, s.update, s.v_hat);
        } else {
            adam_update_into(state.moments[i], s.grad, t, cfg.moments, s.update, s.v_hat);
        }
        // The schedule multiplies the decay once, in apply_update.
        const double coeff = combined_decay_into(theta.values(), s.v_hat, 1.0, decay, s.decay);
        k.apply_update(theta.mutable_values(), s.update, s.decay, eta_t);
        if (observer != nullptr) {
            kept.push_back(std::move(s));
            diag.tensors.push_back(describe(theta, kept.back(), coeff, clip));
        }
    }
    if (on.lookahead) {
        diag.lookahead_synced =
            lookahead_sync(params, state.lookahead, t, cfg.k_lookahead, cfg.beta_lookahead);
    }
    state.steps = t;
    if (observer != nullptr) {
        (*observer)(diag);
    }
}

bool lookahead_sync(std::span<ParamTensor> params, LookaheadState& state, std::int64_t t,
                    std::int64_t k, double beta_lookahead) {
    if (t < 1) {
        throw std::invalid_argument("lookahead_sync: t must be >= 1");
    }
    if (k < 1) {
        throw std::invalid_argument("lookahead_sync: k must be >= 1");
    }
    if (state.slow_weights.size() != params.size()) {
        throw std::invalid_argument("lookahead_sync: slow weights do not match parameters");
    }
    if (t % k != 0) {
        return false;
    }
    const auto& kern = simd::kernels();
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (state.slow_weights[i].size() != params[i].size()) {
            throw std::invalid_argument("lookahead_sync: slow weights for '" + params[i].name() +
                                        "' have the wrong size");
        }
        kern.lookahead_blend(state.slow_weights[i], params[i].mutable_values(), beta_lookahead);
    }
    return true;
}

Optimizer::Optimizer(Preset preset, Ranger21Config config, std::vector<ParamTensor> params)
    : Optimizer(preset, std::move(config), params, OptimizerState::init(params)) {}

Optimizer::Optimizer(Preset preset, Ranger21Config config, std::vector<ParamTensor> params,
                     OptimizerState state)
    : preset_(preset), config_(std::move(config)), params_(std::move(params)), state_(std::move(state)) {
    if (preset_ == Preset::AdamW) {
        AdamWConfig::from(config_).validate();
    } else {
        config_.validate();
    }
    if (state_.moments.size() != params_.size() ||
        state_.lookahead.slow_weights.size() != params_.size()) {
        throw std::invalid_argument("optimizer state does not match the parameter list");
    }
}

void Optimizer::step(std::span<const ParamTensor> grads) {
    const std::int64_t t = state_.steps + 1;
    const StepObserver* obs = observer_ ? &observer_ : nullptr;
    if (preset_ == Preset::AdamW) {
        adamw_step(params_, grads, state_, t, AdamWConfig::from(config_), obs);
    } else {
        ranger21_step(params_, grads, state_, t, config_, obs);
    }
}

}  // namespace ranger21
