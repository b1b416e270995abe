#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "ranger21/grad_transforms.hpp"
#include "ranger21/schedule.hpp"
#include "ranger21/tensor.hpp"
#include "ranger21/update_core.hpp"

namespace ranger21 {

enum class Preset { AdamW, Ranger21 };

std::string_view preset_name(Preset p);
/// "adamw" or "ranger21"; throws std::invalid_argument otherwise.
Preset parse_preset(std::string_view name);

/// Per-component switches of the Ranger21 step. A disabled component falls
/// back to identity (clipping, centralization), classic Adam moments (pnm),
/// plain decay factors (norm_loss, stable_decay) or a factor of 1 (warmup,
/// warmdown).
struct Toggles {
    bool agc = true;
    bool centralization = true;
    bool pnm = true;
    bool norm_loss = true;
    bool stable_decay = true;
    bool warmup = true;
    bool warmdown = true;
    bool lookahead = true;

    static Toggles all_off() { return {false, false, false, false, false, false, false, false}; }

    friend bool operator==(const Toggles&, const Toggles&) = default;
};

struct Ranger21Config {
    ScheduleSpec schedule;
    MomentConfig moments;
    double weight_decay = 1e-4;
    ClipConfig clip;
    std::int64_t k_lookahead = 5;
    double beta_lookahead = 0.5;
    Toggles toggles;

    /// All hyperparameters at their published defaults for the given base
    /// learning rate and run length.
    static Ranger21Config defaults(double eta, std::int64_t t_max);

    DecayConfig decay() const {
        return {weight_decay, toggles.norm_loss, toggles.stable_decay};
    }

    void validate() const;
};

struct AdamWConfig {
    double eta = 3e-3;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamWConfig from(const Ranger21Config& cfg);
    void validate() const;
};

/// Slow weights of the lookahead wrapper, one buffer per parameter,
/// initialized to the starting parameters.
struct LookaheadState {
    std::vector<std::vector<double>> slow_weights;

    static LookaheadState init(std::span<const ParamTensor> params);

    friend bool operator==(const LookaheadState&, const LookaheadState&) = default;
};

struct OptimizerState {
    std::vector<MomentState> moments;
    LookaheadState lookahead;
    /// Number of completed steps; the next step runs at t = steps + 1.
    std::int64_t steps = 0;

    static OptimizerState init(std::span<const ParamTensor> params);

    friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// Intermediates of one parameter tensor within a step. Spans point at
/// scratch buffers and are valid only during the observer call.
struct TensorDiagnostics {
    std::string_view name;
    std::span<const double> grad;    // after clipping and centralization
    std::span<const double> update;  // u_t
    std::span<const double> v_hat;
    std::span<const double> decay;   // decay term before the eta_t factor
    double mean_v_hat = 0.0;
    double decay_coeff = 0.0;        // decay = decay_coeff * theta_{t-1}
    ClipStats clip;
};

struct StepDiagnostics {
    std::int64_t t = 0;
    double eta_t = 0.0;
    bool lookahead_synced = false;
    std::vector<TensorDiagnostics> tensors;
};

using StepObserver = std::function<void(const StepDiagnostics&)>;

/// One AdamW step at global step t (>= 1):
///   theta <- theta - eta * m_hat / (sqrt(v_hat) + eps) - eta * lambda * theta
void adamw_step(std::span<ParamTensor> params, std::span<const ParamTensor> grads,
                OptimizerState& state, std::int64_t t, const AdamWConfig& cfg,
                const StepObserver* observer = nullptr);

/// One Ranger21 step at global step t in [1, t_max]: clip, centralize,
/// positive-negative momentum, scheduled rate, combined decay, lookahead.
void ranger21_step(std::span<ParamTensor> params, std::span<const ParamTensor> grads,
                   OptimizerState& state, std::int64_t t, const Ranger21Config& cfg,
                   const StepObserver* observer = nullptr);

/// Lookahead synchronization: on steps where t % k == 0, blends the slow
/// weights toward the parameters and copies them back. Returns whether it fired.
bool lookahead_sync(std::span<ParamTensor> params, LookaheadState& state, std::int64_t t,
                    std::int64_t k, double beta_lookahead);

/// Owns a parameter list and its optimizer state and advances them one step
/// at a time with the chosen preset.
class Optimizer {
public:
    Optimizer(Preset preset, Ranger21Config config, std::vector<ParamTensor> params);

    /// Restores a saved optimizer exactly (see checkpoint.hpp).
    Optimizer(Preset preset, Ranger21Config config, std::vector<ParamTensor> params,
              OptimizerState state);

    void step(std::span<const ParamTensor> grads);

    Preset preset() const noexcept { return preset_; }
    const Ranger21Config& config() const noexcept { return config_; }
    std::span<const ParamTensor> params() const noexcept { return params_; }
    const OptimizerState& state() const noexcept { return state_; }
    std::int64_t steps_taken() const noexcept { return state_.steps; }

    void set_observer(StepObserver observer) { observer_ = std::move(observer); }

private:
    Preset preset_;
    Ranger21Config config_;
    std::vector<ParamTensor> params_;
    OptimizerState state_;
    StepObserver observer_;
};

}  // namespace ranger21
