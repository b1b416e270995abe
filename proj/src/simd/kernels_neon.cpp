// NEON variants of the kernel table (AArch64, two doubles per register).
// Reductions run two accumulators side by side so the four partial sums line
// up with the reference lane layout.

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "ranger21/simd/kernels.hpp"

namespace ranger21::simd::detail {
namespace {

constexpr std::size_t kBlock = 4;

inline double combine_lanes(float64x2_t lo, float64x2_t hi) {
    const double a = vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1);
    const double b = vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1);
    return a + b;
}

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kBlock;
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n4; i += kBlock) {
        lo = vaddq_f64(lo, vld1q_f64(x.data() + i));
        hi = vaddq_f64(hi, vld1q_f64(x.data() + i + 2));
    }
    double total = combine_lanes(lo, hi);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + x[i];
    }
    return total;
}

double sum_squares(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kBlock;
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n4; i += kBlock) {
        const float64x2_t a = vld1q_f64(x.data() + i);
        const float64x2_t b = vld1q_f64(x.data() + i + 2);
        lo = vaddq_f64(lo, vmulq_f64(a, a));
        hi = vaddq_f64(hi, vmulq_f64(b, b));
    }
    double total = combine_lanes(lo, hi);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + x[i] * x[i];
    }
    return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kBlock;
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n4; i += kBlock) {
        lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x.data() + i), vld1q_f64(y.data() + i)));
        hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x.data() + i + 2), vld1q_f64(y.data() + i + 2)));
    }
    double total = combine_lanes(lo, hi);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + x[i] * y[i];
    }
    return total;
}

void scale(std::span<double> x, double alpha) {
    const std::size_t n = x.size();
    const std::size_t n2 = n - n % 2;
    const float64x2_t a = vdupq_n_f64(alpha);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(x.data() + i, vmulq_f64(a, vld1q_f64(x.data() + i)));
    }
    for (std::size_t i = n2; i < n; ++i) {
        x[i] = alpha * x[i];
    }
}

void scaled_copy(std::span<const double> x, double alpha, std::span<double> out) {
    const std::size_t n = x.size();
    const std::size_t n2 = n - n % 2;
    const float64x2_t a = vdupq_n_f64(alpha);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(out.data() + i, vmulq_f64(a, vld1q_f64(x.data() + i)));
    }
    for (std::size_t i = n2; i < n; ++i) {
        out[i] = alpha * x[i];
    }
}

void add_scalar(std::span<double> x, double c) {
    const std::size_t n = x.size();
    const std::size_t n2 = n - n % 2;
    const float64x2_t cv = vdupq_n_f64(c);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(x.data() + i, vaddq_f64(vld1q_f64(x.data() + i), cv));
    }
    for (std::size_t i = n2; i < n; ++i) {
        x[i] = x[i] + c;
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const std::size_t n2 = n - n % 2;
    const float64x2_t a = vdupq_n_f64(alpha);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t prod = vmulq_f64(a, vld1q_f64(x.data() + i));
        vst1q_f64(y.data() + i, vaddq_f64(vld1q_f64(y.data() + i), prod));
    }
    for (std::size_t i = n2; i < n; ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

void adam_moments(const AdamMomentArgs& a) {
    const std::size_t n = a.grad.size();
    const std::size_t n2 = n - n % 2;
    const double one_minus_b1 = 1.0 - a.beta1;
    const double one_minus_b2 = 1.0 - a.beta2;
    const float64x2_t b1 = vdupq_n_f64(a.beta1);
    const float64x2_t b2 = vdupq_n_f64(a.beta2);
    const float64x2_t c1 = vdupq_n_f64(one_minus_b1);
    const float64x2_t c2 = vdupq_n_f64(one_minus_b2);
    const float64x2_t bc1 = vdupq_n_f64(a.bias_correction1);
    const float64x2_t bc2 = vdupq_n_f64(a.bias_correction2);
    const float64x2_t eps = vdupq_n_f64(a.eps);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t g = vld1q_f64(a.grad.data() + i);
        const float64x2_t m = vaddq_f64(vmulq_f64(b1, vld1q_f64(a.m.data() + i)), vmulq_f64(c1, g));
        const float64x2_t v =
            vaddq_f64(vmulq_f64(b2, vld1q_f64(a.v.data() + i)), vmulq_f64(c2, vmulq_f64(g, g)));
        vst1q_f64(a.m.data() + i, m);
        vst1q_f64(a.v.data() + i, v);
        const float64x2_t m_hat = vdivq_f64(m, bc1);
        const float64x2_t v_hat = vdivq_f64(v, bc2);
        vst1q_f64(a.v_hat.data() + i, v_hat);
        vst1q_f64(a.update.data() + i, vdivq_f64(m_hat, vaddq_f64(vsqrtq_f64(v_hat), eps)));
    }
    for (std::size_t i = n2; i < n; ++i) {
        const double g = a.grad[i];
        const double m = a.beta1 * a.m[i] + one_minus_b1 * g;
        const double v = a.beta2 * a.v[i] + one_minus_b2 * (g * g);
        a.m[i] = m;
        a.v[i] = v;
        const double m_hat = m / a.bias_correction1;
        const double v_hat = v / a.bias_correction2;
        a.v_hat[i] = v_hat;
        a.update[i] = m_hat / (std::sqrt(v_hat) + a.eps);
    }
}

void pnm_moments(const PnmMomentArgs& a) {
    const std::size_t n = a.grad.size();
    const std::size_t n2 = n - n % 2;
    const double one_minus_b1sq = 1.0 - a.beta1_sq;
    const double one_minus_b2 = 1.0 - a.beta2;
    const double pos = 1.0 + a.beta0;
    const float64x2_t b1sq = vdupq_n_f64(a.beta1_sq);
    const float64x2_t c1 = vdupq_n_f64(one_minus_b1sq);
    const float64x2_t b2 = vdupq_n_f64(a.beta2);
    const float64x2_t c2 = vdupq_n_f64(one_minus_b2);
    const float64x2_t posv = vdupq_n_f64(pos);
    const float64x2_t b0 = vdupq_n_f64(a.beta0);
    const float64x2_t bc1 = vdupq_n_f64(a.bias_correction1);
    const float64x2_t bc2 = vdupq_n_f64(a.bias_correction2);
    const float64x2_t eps = vdupq_n_f64(a.eps);
    const float64x2_t norm = vdupq_n_f64(a.normalizer);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t g = vld1q_f64(a.grad.data() + i);
        const float64x2_t m =
            vaddq_f64(vmulq_f64(b1sq, vld1q_f64(a.m_prev2.data() + i)), vmulq_f64(c1, g));
        vst1q_f64(a.m_prev2.data() + i, m);
        const float64x2_t m_hat = vdivq_f64(
            vsubq_f64(vmulq_f64(posv, m), vmulq_f64(b0, vld1q_f64(a.m_prev.data() + i))), bc1);
        const float64x2_t v =
            vaddq_f64(vmulq_f64(b2, vld1q_f64(a.v.data() + i)), vmulq_f64(c2, vmulq_f64(g, g)));
        vst1q_f64(a.v.data() + i, v);
        // Inputs are finite and non-negative, so vmaxq agrees with std::max.
        const float64x2_t v_max = vmaxq_f64(vld1q_f64(a.v_max.data() + i), v);
        vst1q_f64(a.v_max.data() + i, v_max);
        const float64x2_t v_hat = vdivq_f64(v_max, bc2);
        vst1q_f64(a.v_hat.data() + i, v_hat);
        vst1q_f64(a.update.data() + i,
                  vdivq_f64(m_hat, vmulq_f64(norm, vaddq_f64(vsqrtq_f64(v_hat), eps))));
    }
    for (std::size_t i = n2; i < n; ++i) {
        const double g = a.grad[i];
        const double m = a.beta1_sq * a.m_prev2[i] + one_minus_b1sq * g;
        a.m_prev2[i] = m;
        const double m_hat = (pos * m - a.beta0 * a.m_prev[i]) / a.bias_correction1;
        const double v = a.beta2 * a.v[i] + one_minus_b2 * (g * g);
        a.v[i] = v;
        const double v_max = std::max(a.v_max[i], v);
        a.v_max[i] = v_max;
        const double v_hat = v_max / a.bias_correction2;
        a.v_hat[i] = v_hat;
        a.update[i] = m_hat / (a.normalizer * (std::sqrt(v_hat) + a.eps));
    }
}

void apply_update(std::span<double> theta, std::span<const double> update,
                  std::span<const double> decay, double eta) {
    const std::size_t n = theta.size();
    const std::size_t n2 = n - n % 2;
    const float64x2_t e = vdupq_n_f64(eta);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t step =
            vsubq_f64(vld1q_f64(theta.data() + i), vmulq_f64(e, vld1q_f64(update.data() + i)));
        vst1q_f64(theta.data() + i, vsubq_f64(step, vmulq_f64(e, vld1q_f64(decay.data() + i))));
    }
    for (std::size_t i = n2; i < n; ++i) {
        theta[i] = (theta[i] - eta * update[i]) - eta * decay[i];
    }
}

void lookahead_blend(std::span<double> slow, std::span<double> theta, double beta) {
    const std::size_t n = theta.size();
    const std::size_t n2 = n - n % 2;
    const double one_minus_beta = 1.0 - beta;
    const float64x2_t b = vdupq_n_f64(beta);
    const float64x2_t c = vdupq_n_f64(one_minus_beta);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t l =
            vaddq_f64(vmulq_f64(b, vld1q_f64(slow.data() + i)), vmulq_f64(c, vld1q_f64(theta.data() + i)));
        vst1q_f64(slow.data() + i, l);
        vst1q_f64(theta.data() + i, l);
    }
    for (std::size_t i = n2; i < n; ++i) {
        const double l = beta * slow[i] + one_minus_beta * theta[i];
        slow[i] = l;
        theta[i] = l;
    }
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{
        Backend::Neon, sum,          sum_squares, dot,          scale,           scaled_copy,
        add_scalar,    axpy,         adam_moments, pnm_moments, apply_update,    lookahead_blend,
    };
    return table;
}

}  // namespace ranger21::simd::detail
