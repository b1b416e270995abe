#pragma once

// Data-parallel inner loops behind every optimizer and model routine.
//
// Each backend implements the same table. The scalar backend is the
// reference; vector backends must reproduce it bit for bit. Two rules make
// that possible:
//   * elementwise kernels use the same sequence of correctly rounded IEEE
//     operations (the build disables FMA contraction), and
//   * reductions use one fixed order for every backend: four interleaved
//     partial sums (element i goes to lane i % 4 over the largest multiple
//     of four), combined as (l0 + l1) + (l2 + l3), then the tail added
//     left to right.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ranger21::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

/// Parses "scalar", "avx2", "neon"; throws std::invalid_argument otherwise.
Backend parse_backend(std::string_view name);

/// Arguments of the Adam moment kernel (the classic first/second moment pair).
struct AdamMomentArgs {
    std::span<const double> grad;
    std::span<double> m;       // in/out
    std::span<double> v;       // in/out
    std::span<double> update;  // out: m_hat / (sqrt(v_hat) + eps)
    std::span<double> v_hat;   // out
    double beta1;
    double beta2;
    double bias_correction1;  // 1 - beta1^t
    double bias_correction2;  // 1 - beta2^t
    double eps;
};

/// Arguments of the positive-negative momentum kernel with max second moment.
/// `m_prev2` holds m_{t-2} on entry and m_t on exit; the caller rotates the
/// two first-moment buffers afterwards.
struct PnmMomentArgs {
    std::span<const double> grad;
    std::span<const double> m_prev;  // m_{t-1}
    std::span<double> m_prev2;       // m_{t-2} in, m_t out
    std::span<double> v;             // in/out
    std::span<double> v_max;         // in/out
    std::span<double> update;        // out
    std::span<double> v_hat;         // out
    double beta0;
    double beta1_sq;
    double beta2;
    double bias_correction1;
    double bias_correction2;
    double eps;
    double normalizer;  // sqrt((1 + beta0)^2 + beta0^2)
};

struct KernelTable {
    Backend backend;

    double (*sum)(std::span<const double> x);
    double (*sum_squares)(std::span<const double> x);
    double (*dot)(std::span<const double> x, std::span<const double> y);

    /// x *= alpha
    void (*scale)(std::span<double> x, double alpha);
    /// out = alpha * x
    void (*scaled_copy)(std::span<const double> x, double alpha, std::span<double> out);
    /// x += c
    void (*add_scalar)(std::span<double> x, double c);
    /// y += alpha * x
    void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);

    void (*adam_moments)(const AdamMomentArgs& args);
    void (*pnm_moments)(const PnmMomentArgs& args);

    /// theta = (theta - eta * update) - eta * decay
    void (*apply_update)(std::span<double> theta, std::span<const double> update,
                         std::span<const double> decay, double eta);
    /// slow = beta * slow + (1 - beta) * theta; theta = slow
    void (*lookahead_blend)(std::span<double> slow, std::span<double> theta, double beta);
};

/// Table for a specific backend, or nullptr when this build or CPU lacks it.
const KernelTable* kernels_for(Backend b);

/// Backends usable on this machine, scalar first.
std::vector<Backend> available_backends();

/// The active table. Chosen once on first use: the RANGER21_SIMD environment
/// variable if set, otherwise the widest backend the CPU supports.
const KernelTable& kernels();

/// Overrides the active backend (tests and the CLI's --simd flag).
/// Throws std::invalid_argument if the backend is unavailable.
void set_backend(Backend b);

Backend active_backend();

namespace detail {
const KernelTable& scalar_table();
#if defined(RANGER21_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(RANGER21_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace ranger21::simd
