#pragma once

#include <cstdint>

namespace ranger21 {

/// Parameters of the three-phase learning-rate schedule: linear warm-up,
/// flat exploration, linear warm-down to zero. Steps are 1-based.
struct ScheduleSpec {
    double eta = 3e-3;
    double beta2 = 0.999;
    std::int64_t t_max = 1;
    std::int64_t t_warmup = 1;
    std::int64_t t_warmdown = 1;

    /// Spec with t_warmup = round(0.22 t_max) and t_warmdown = round(0.28 t_max),
    /// each at least 1.
    static ScheduleSpec with_defaults(double eta, double beta2, std::int64_t t_max);

    void validate() const;

    /// True when warm-up and warm-down overlap (no flat phase).
    bool phases_overlap() const noexcept { return t_warmup + t_warmdown > t_max; }
};

/// round-half-up(fraction * t_max), clamped to >= 1.
std::int64_t default_phase_length(double fraction, std::int64_t t_max);

inline constexpr double kWarmupFraction = 0.22;
inline constexpr double kWarmdownFraction = 0.28;

/// min(1, max((1 - beta2)/2 * t, t / t_warmup))
double warmup_factor(std::int64_t t, const ScheduleSpec& spec);

/// min(1, (t_max - t) / t_warmdown)
double warmdown_factor(std::int64_t t, const ScheduleSpec& spec);

/// Combined factor in [0, 1]; the scheduled rate is lr_factor * eta.
/// Throws std::out_of_range unless 1 <= t <= t_max.
double lr_factor(std::int64_t t, const ScheduleSpec& spec);

}  // namespace ranger21
