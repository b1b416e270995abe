#include "ranger21/update_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ranger21/simd/kernels.hpp"

namespace ranger21 {
namespace {

void require_beta(double beta, const char* name) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1), got " +
                                    std::to_string(beta));
    }
}

void require_step(std::int64_t t) {
    if (t < 1) {
        throw std::invalid_argument("step index t must be >= 1, got " + std::to_string(t));
    }
}

void require_buffers(const MomentState& state, std::size_t n) {
    if (state.m_prev.size() != n || state.m_prev2.size() != n || state.v.size() != n ||
        state.v_max.size() != n) {
        throw std::invalid_argument("moment state holds " + std::to_string(state.size()) +
                                    " elements but the gradient has " + std::to_string(n));
    }
}

}  // namespace

void MomentConfig::validate() const {
    require_beta(beta0, "beta0");
    require_beta(beta1, "beta1");
    require_beta(beta2, "beta2");
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive, got " + std::to_string(eps));
    }
}

void DecayConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("weight decay must be finite and >= 0, got " +
                                    std::to_string(lambda));
    }
}

void pnm_update_into(MomentState& state, std::span<const double> grad, std::int64_t t,
                     const MomentConfig& cfg, std::span<double> update, std::span<double> v_hat) {
    require_step(t);
    require_buffers(state, grad.size());
    const double td = static_cast<double>(t);
    simd::PnmMomentArgs args{
        .grad = grad,
        .m_prev = state.m_prev,
        .m_prev2 = state.m_prev2,
        .v = state.v,
        .v_max = state.v_max,
        .update = update,
        .v_hat = v_hat,
        .beta0 = cfg.beta0,
        .beta1_sq = cfg.beta1 * cfg.beta1,
        .beta2 = cfg.beta2,
        .bias_correction1 = 1.0 - std::pow(cfg.beta1, td),
        .bias_correction2 = 1.0 - std::pow(cfg.beta2, td),
        .eps = cfg.eps,
        .normalizer = std::sqrt((1.0 + cfg.beta0) * (1.0 + cfg.beta0) + cfg.beta0 * cfg.beta0),
    };
    simd::kernels().pnm_moments(args);
    // m_prev2 now holds m_t: shift the window so m_prev = m_t, m_prev2 = m_{t-1}.
    state.m_prev.swap(state.m_prev2);
}

MomentOutput pnm_update(MomentState& state, const ParamTensor& grad, std::int64_t t,
                        const MomentConfig& cfg) {
    cfg.validate();
    std::vector<double> u(grad.size());
    std::vector<double> vh(grad.size());
    pnm_update_into(state, grad.values(), t, cfg, u, vh);
    return {grad.with_values(std::move(u)), grad.with_values(std::move(vh))};
}

void adam_update_into(MomentState& state, std::span<const double> grad, std::int64_t t,
                      const MomentConfig& cfg, std::span<double> update, std::span<double> v_hat) {
    require_step(t);
    require_buffers(state, grad.size());
    const double td = static_cast<double>(t);
    simd::AdamMomentArgs args{
        .grad = grad,
        .m = state.m_prev,
        .v = state.v,
        .update = update,
        .v_hat = v_hat,
        .beta1 = cfg.beta1,
        .beta2 = cfg.beta2,
        .bias_correction1 = 1.0 - std::pow(cfg.beta1, td),
        .bias_correction2 = 1.0 - std::pow(cfg.beta2, td),
        .eps = cfg.eps,
    };
    simd::kernels().adam_moments(args);
}

MomentOutput adam_update(MomentState& state, const ParamTensor& grad, std::int64_t t,
                         const MomentConfig& cfg) {
    cfg.validate();
    std::vector<double> u(grad.size());
    std::vector<double> vh(grad.size());
    adam_update_into(state, grad.values(), t, cfg, u, vh);
    return {grad.with_values(std::move(u)), grad.with_values(std::move(vh))};
}

double combined_decay_into(std::span<const double> theta, std::span<const double> v_hat,
                           double eta_t, const DecayConfig& cfg, std::span<double> out) {
    const auto& k = simd::kernels();
    double coeff = eta_t * cfg.lambda;
    if (cfg.stable_decay_enabled) {
        const double mean_v_hat = k.sum(v_hat) / static_cast<double>(v_hat.size());
        coeff = coeff / std::max(std::sqrt(mean_v_hat), kStableDecayFloor);
    }
    if (cfg.norm_loss_enabled) {
        const double norm = std::sqrt(k.sum_squares(theta));
        // (1 - 1/||theta||) * theta is taken as 0 at theta = 0.
        coeff = norm > 0.0 ? coeff * (1.0 - 1.0 / norm) : 0.0;
    }
    k.scaled_copy(theta, coeff, out);
    return coeff;
}

ParamTensor combined_decay(const ParamTensor& theta, const ParamTensor& v_hat, double eta_t,
                           const DecayConfig& cfg) {
    require_same_shape(theta, v_hat, "combined_decay");
    cfg.validate();
    if (!(eta_t >= 0.0)) {
        throw std::invalid_argument("combined_decay: eta_t must be >= 0");
    }
    std::vector<double> out(theta.size());
    combined_decay_into(theta.values(), v_hat.values(), eta_t, cfg, out);
    return theta.with_values(std::move(out));
}

}  // namespace ranger21
