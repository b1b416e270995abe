#include <algorithm>
#include <cmath>

#include "ranger21/simd/kernels.hpp"

namespace ranger21::simd::detail {
namespace {

constexpr std::size_t kLanes = 4;

template <typename Term>
double blocked_sum(std::size_t n, Term term) {
    const std::size_t n4 = n - n % kLanes;
    double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n4; i += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) {
            lane[j] = lane[j] + term(i + j);
        }
    }
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + term(i);
    }
    return total;
}

double sum(std::span<const double> x) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i]; });
}

double sum_squares(std::span<const double> x) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i] * x[i]; });
}

double dot(std::span<const double> x, std::span<const double> y) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

void scale(std::span<double> x, double alpha) {
    for (double& xi : x) {
        xi = alpha * xi;
    }
}

void scaled_copy(std::span<const double> x, double alpha, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = alpha * x[i];
    }
}

void add_scalar(std::span<double> x, double c) {
    for (double& xi : x) {
        xi = xi + c;
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

void adam_moments(const AdamMomentArgs& a) {
    const double one_minus_b1 = 1.0 - a.beta1;
    const double one_minus_b2 = 1.0 - a.beta2;
    for (std::size_t i = 0; i < a.grad.size(); ++i) {
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
    const double one_minus_b1sq = 1.0 - a.beta1_sq;
    const double one_minus_b2 = 1.0 - a.beta2;
    const double pos = 1.0 + a.beta0;
    for (std::size_t i = 0; i < a.grad.size(); ++i) {
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
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = (theta[i] - eta * update[i]) - eta * decay[i];
    }
}

void lookahead_blend(std::span<double> slow, std::span<double> theta, double beta) {
    const double one_minus_beta = 1.0 - beta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double l = beta * slow[i] + one_minus_beta * theta[i];
        slow[i] = l;
        theta[i] = l;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        Backend::Scalar, sum,          sum_squares, dot,          scale,           scaled_copy,
        add_scalar,      axpy,         adam_moments, pnm_moments, apply_update,    lookahead_blend,
    };
    return table;
}

}  // namespace ranger21::simd::detail
