// AVX2 variants of the kernel table. Four doubles per register, which is
// exactly the lane layout of the reference reduction order, so reductions
// keep one accumulator register and no reassociation is needed.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "ranger21/simd/kernels.hpp"

namespace ranger21::simd::detail {
namespace {

constexpr std::size_t kWidth = 4;

inline double combine_lanes(__m256d acc) {
    alignas(32) double lane[kWidth];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += kWidth) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
    }
    double total = combine_lanes(acc);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + x[i];
    }
    return total;
}

double sum_squares(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += kWidth) {
        const __m256d v = _mm256_loadu_pd(x.data() + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double total = combine_lanes(acc);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + x[i] * x[i];
    }
    return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += kWidth) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i),
                                               _mm256_loadu_pd(y.data() + i)));
    }
    double total = combine_lanes(acc);
    for (std::size_t i = n4; i < n; ++i) {
        total = total + x[i] * y[i];
    }
    return total;
}

void scale(std::span<double> x, double alpha) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    const __m256d a = _mm256_set1_pd(alpha);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(a, _mm256_loadu_pd(x.data() + i)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        x[i] = alpha * x[i];
    }
}

void scaled_copy(std::span<const double> x, double alpha, std::span<double> out) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    const __m256d a = _mm256_set1_pd(alpha);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(a, _mm256_loadu_pd(x.data() + i)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        out[i] = alpha * x[i];
    }
}

void add_scalar(std::span<double> x, double c) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    const __m256d cv = _mm256_set1_pd(c);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        _mm256_storeu_pd(x.data() + i, _mm256_add_pd(_mm256_loadu_pd(x.data() + i), cv));
    }
    for (std::size_t i = n4; i < n; ++i) {
        x[i] = x[i] + c;
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % kWidth;
    const __m256d a = _mm256_set1_pd(alpha);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x.data() + i));
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(_mm256_loadu_pd(y.data() + i), prod));
    }
    for (std::size_t i = n4; i < n; ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

void adam_moments(const AdamMomentArgs& a) {
    const std::size_t n = a.grad.size();
    const std::size_t n4 = n - n % kWidth;
    const double one_minus_b1 = 1.0 - a.beta1;
    const double one_minus_b2 = 1.0 - a.beta2;
    const __m256d b1 = _mm256_set1_pd(a.beta1);
    const __m256d b2 = _mm256_set1_pd(a.beta2);
    const __m256d c1 = _mm256_set1_pd(one_minus_b1);
    const __m256d c2 = _mm256_set1_pd(one_minus_b2);
    const __m256d bc1 = _mm256_set1_pd(a.bias_correction1);
    const __m256d bc2 = _mm256_set1_pd(a.bias_correction2);
    const __m256d eps = _mm256_set1_pd(a.eps);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        const __m256d g = _mm256_loadu_pd(a.grad.data() + i);
        const __m256d m = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(a.m.data() + i)),
                                        _mm256_mul_pd(c1, g));
        const __m256d v = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(a.v.data() + i)),
                                        _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(a.m.data() + i, m);
        _mm256_storeu_pd(a.v.data() + i, v);
        const __m256d m_hat = _mm256_div_pd(m, bc1);
        const __m256d v_hat = _mm256_div_pd(v, bc2);
        _mm256_storeu_pd(a.v_hat.data() + i, v_hat);
        _mm256_storeu_pd(a.update.data() + i,
                         _mm256_div_pd(m_hat, _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps)));
    }
    for (std::size_t i = n4; i < n; ++i) {
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
    const std::size_t n4 = n - n % kWidth;
    const double one_minus_b1sq = 1.0 - a.beta1_sq;
    const double one_minus_b2 = 1.0 - a.beta2;
    const double pos = 1.0 + a.beta0;
    const __m256d b1sq = _mm256_set1_pd(a.beta1_sq);
    const __m256d c1 = _mm256_set1_pd(one_minus_b1sq);
    const __m256d b2 = _mm256_set1_pd(a.beta2);
    const __m256d c2 = _mm256_set1_pd(one_minus_b2);
    const __m256d posv = _mm256_set1_pd(pos);
    const __m256d b0 = _mm256_set1_pd(a.beta0);
    const __m256d bc1 = _mm256_set1_pd(a.bias_correction1);
    const __m256d bc2 = _mm256_set1_pd(a.bias_correction2);
    const __m256d eps = _mm256_set1_pd(a.eps);
    const __m256d norm = _mm256_set1_pd(a.normalizer);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        const __m256d g = _mm256_loadu_pd(a.grad.data() + i);
        const __m256d m = _mm256_add_pd(_mm256_mul_pd(b1sq, _mm256_loadu_pd(a.m_prev2.data() + i)),
                                        _mm256_mul_pd(c1, g));
        _mm256_storeu_pd(a.m_prev2.data() + i, m);
        const __m256d m_hat = _mm256_div_pd(
            _mm256_sub_pd(_mm256_mul_pd(posv, m),
                          _mm256_mul_pd(b0, _mm256_loadu_pd(a.m_prev.data() + i))),
            bc1);
        const __m256d v = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(a.v.data() + i)),
                                        _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(a.v.data() + i, v);
        // max_pd(v, old) returns `old` on ties, matching std::max(old, v).
        const __m256d v_max = _mm256_max_pd(v, _mm256_loadu_pd(a.v_max.data() + i));
        _mm256_storeu_pd(a.v_max.data() + i, v_max);
        const __m256d v_hat = _mm256_div_pd(v_max, bc2);
        _mm256_storeu_pd(a.v_hat.data() + i, v_hat);
        _mm256_storeu_pd(
            a.update.data() + i,
            _mm256_div_pd(m_hat, _mm256_mul_pd(norm, _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps))));
    }
    for (std::size_t i = n4; i < n; ++i) {
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
    const std::size_t n4 = n - n % kWidth;
    const __m256d e = _mm256_set1_pd(eta);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        const __m256d step = _mm256_sub_pd(_mm256_loadu_pd(theta.data() + i),
                                           _mm256_mul_pd(e, _mm256_loadu_pd(update.data() + i)));
        _mm256_storeu_pd(theta.data() + i,
                         _mm256_sub_pd(step, _mm256_mul_pd(e, _mm256_loadu_pd(decay.data() + i))));
    }
    for (std::size_t i = n4; i < n; ++i) {
        theta[i] = (theta[i] - eta * update[i]) - eta * decay[i];
    }
}

void lookahead_blend(std::span<double> slow, std::span<double> theta, double beta) {
    const std::size_t n = theta.size();
    const std::size_t n4 = n - n % kWidth;
    const double one_minus_beta = 1.0 - beta;
    const __m256d b = _mm256_set1_pd(beta);
    const __m256d c = _mm256_set1_pd(one_minus_beta);
    for (std::size_t i = 0; i < n4; i += kWidth) {
        const __m256d l = _mm256_add_pd(_mm256_mul_pd(b, _mm256_loadu_pd(slow.data() + i)),
                                        _mm256_mul_pd(c, _mm256_loadu_pd(theta.data() + i)));
        _mm256_storeu_pd(slow.data() + i, l);
        _mm256_storeu_pd(theta.data() + i, l);
    }
    for (std::size_t i = n4; i < n; ++i) {
        const double l = beta * slow[i] + one_minus_beta * theta[i];
        slow[i] = l;
        theta[i] = l;
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        Backend::Avx2, sum,          sum_squares, dot,          scale,           scaled_copy,
        add_scalar,    axpy,         adam_moments, pnm_moments, apply_update,    lookahead_blend,
    };
    return table;
}

}  // namespace ranger21::simd::detail
