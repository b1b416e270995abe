#include "ranger21/grad_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranger21/simd/kernels.hpp"

namespace ranger21 {

void ClipConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("clip tau must be a finite positive number, got " +
                                    std::to_string(tau));
    }
    if (!(eps_clipping > 0.0) || !std::isfinite(eps_clipping)) {
        throw std::invalid_argument("clip eps must be a finite positive number, got " +
                                    std::to_string(eps_clipping));
    }
}

ClipStats adaptive_gradient_clip_in_place(std::span<double> grad, std::span<const double> theta,
                                          const Shape& shape, const ClipConfig& cfg) {
    const auto& k = simd::kernels();
    const std::size_t rows = shape.front();
    const std::size_t width = grad.size() / rows;
    ClipStats stats;
    stats.units = rows;
    for (std::size_t r = 0; r < rows; ++r) {
        auto g_row = grad.subspan(r * width, width);
        const double g_norm = std::sqrt(k.sum_squares(g_row));
        const double w_norm =
            std::max(std::sqrt(k.sum_squares(theta.subspan(r * width, width))), cfg.eps_clipping);
        const double ratio = g_norm / w_norm;
        stats.ratio_sum += ratio;
        if (ratio > cfg.tau) {
            k.scale(g_row, cfg.tau * w_norm / g_norm);
            ++stats.clipped;
        }
    }
    return stats;
}

ParamTensor adaptive_gradient_clip(const ParamTensor& grad, const ParamTensor& theta,
                                   const ClipConfig& cfg) {
    require_same_shape(grad, theta, "adaptive_gradient_clip");
    cfg.validate();
    std::vector<double> out(grad.values().begin(), grad.values().end());
    adaptive_gradient_clip_in_place(out, theta.values(), grad.shape(), cfg);
    return grad.with_values(std::move(out));
}

ParamTensor threshold_clip_oracle(const ParamTensor& grad, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("threshold_clip_oracle: tau must be positive");
    }
    const double norm = frobenius_norm(grad);
    if (!(norm > tau)) {
        return grad;
    }
    std::vector<double> out(grad.values().begin(), grad.values().end());
    const double factor = tau / norm;
    for (double& x : out) {
        x *= factor;
    }
    return grad.with_values(std::move(out));
}

void gradient_centralize_in_place(std::span<double> grad, const Shape& shape) {
    if (shape.size() < 2) {
        return;
    }
    const auto& k = simd::kernels();
    const std::size_t rows = shape.front();
    const std::size_t width = grad.size() / rows;
    for (std::size_t r = 0; r < rows; ++r) {
        auto g_row = grad.subspan(r * width, width);
        const double mean = k.sum(g_row) / static_cast<double>(width);
        k.add_scalar(g_row, -mean);
    }
}

ParamTensor gradient_centralize(const ParamTensor& grad) {
    std::vector<double> out(grad.values().begin(), grad.values().end());
    gradient_centralize_in_place(out, grad.shape());
    return grad.with_values(std::move(out));
}

}  // namespace ranger21
