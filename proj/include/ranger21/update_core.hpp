#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ranger21/tensor.hpp"

namespace ranger21 {

struct MomentConfig {
    double beta0 = 0.9;  // positive-negative momentum weight
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

/// Per-parameter moment buffers, all zero-initialized and shaped like the
/// owning parameter.
///
/// For positive-negative momentum, `m_prev` is m_{t-1} and `m_prev2` is
/// m_{t-2}. The classic Adam path uses only `m_prev` (as m_{t-1}) and `v`.
struct MomentState {
    std::vector<double> m_prev;
    std::vector<double> m_prev2;
    std::vector<double> v;
    std::vector<double> v_max;

    explicit MomentState(std::size_t n = 0) : m_prev(n), m_prev2(n), v(n), v_max(n) {}

    std::size_t size() const noexcept { return v.size(); }

    friend bool operator==(const MomentState&, const MomentState&) = default;
};

struct MomentOutput {
    ParamTensor update;
    ParamTensor v_hat;
};

/// Positive-negative momentum with a running maximum of the second moment,
/// for global step `t` (1-based). Advances `state` and rotates the two
/// first-moment buffers.
MomentOutput pnm_update(MomentState& state, const ParamTensor& grad, std::int64_t t,
                        const MomentConfig& cfg);

/// Buffer-level form used by the optimizer step. `update` and `v_hat` receive
/// the results.
void pnm_update_into(MomentState& state, std::span<const double> grad, std::int64_t t,
                     const MomentConfig& cfg, std::span<double> update, std::span<double> v_hat);

/// Classic Adam moments (no max, single first-moment buffer in `m_prev`).
MomentOutput adam_update(MomentState& state, const ParamTensor& grad, std::int64_t t,
                         const MomentConfig& cfg);

void adam_update_into(MomentState& state, std::span<const double> grad, std::int64_t t,
                      const MomentConfig& cfg, std::span<double> update, std::span<double> v_hat);

struct DecayConfig {
    double lambda = 1e-4;
    bool norm_loss_enabled = true;
    bool stable_decay_enabled = true;

    void validate() const;
};

/// Floor for sqrt(mean(v_hat)) in the stable decay denominator.
inline constexpr double kStableDecayFloor = 1e-8;

/// Combined norm-loss and stable weight decay term
///   d = eta_t / sqrt(mean(v_hat)) * lambda * (1 - 1/||theta||) * theta
/// with each factor dropped when its flag is off. ||theta|| is the whole
/// tensor's Frobenius norm and mean(v_hat) is taken over the whole tensor.
/// An all-zero theta yields d = 0.
ParamTensor combined_decay(const ParamTensor& theta, const ParamTensor& v_hat, double eta_t,
                           const DecayConfig& cfg);

/// Writes the decay into `out` and returns the scalar coefficient applied to
/// theta.
double combined_decay_into(std::span<const double> theta, std::span<const double> v_hat,
                           double eta_t, const DecayConfig& cfg, std::span<double> out);

}  // namespace ranger21
