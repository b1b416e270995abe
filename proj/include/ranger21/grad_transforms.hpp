#pragma once

#include <cstddef>
#include <span>

#include "ranger21/tensor.hpp"

namespace ranger21 {

struct ClipConfig {
    double tau = 1e-2;
    double eps_clipping = 1e-3;

    void validate() const;
};

struct ClipStats {
    std::size_t units = 0;
    std::size_t clipped = 0;
    /// Sum over units of ||g_r|| / max(||theta_r||, eps) before clipping.
    double ratio_sum = 0.0;
};

/// Unit-wise adaptive gradient clipping. A unit is a dim-0 slice; every
/// element of a rank-1 tensor is its own unit. Units whose gradient-to-weight
/// norm ratio exceeds tau are rescaled onto the ratio bound, keeping their
/// direction.
ParamTensor adaptive_gradient_clip(const ParamTensor& grad, const ParamTensor& theta,
                                   const ClipConfig& cfg);

/// In-place form used by the optimizer step. `grad` and `theta` share the
/// row layout of `shape`.
ClipStats adaptive_gradient_clip_in_place(std::span<double> grad, std::span<const double> theta,
                                          const Shape& shape, const ClipConfig& cfg);

/// Whole-tensor threshold clipping (rescale to norm tau when ||g|| > tau).
/// Kept as a reference for tests; no optimizer preset uses it.
ParamTensor threshold_clip_oracle(const ParamTensor& grad, double tau);

/// Subtracts each dim-0 slice's mean. Rank-1 tensors are returned unchanged.
ParamTensor gradient_centralize(const ParamTensor& grad);

void gradient_centralize_in_place(std::span<double> grad, const Shape& shape);

}  // namespace ranger21
