#include "ranger21/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ranger21 {
namespace {

void require_in_range(std::int64_t t, const ScheduleSpec& spec) {
    if (t < 1 || t > spec.t_max) {
        throw std::out_of_range("schedule step " + std::to_string(t) + " outside [1, " +
                                std::to_string(spec.t_max) + "]");
    }
}

}  // namespace

std::int64_t default_phase_length(double fraction, std::int64_t t_max) {
    const auto n = static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(t_max) + 0.5));
    return std::max<std::int64_t>(n, 1);
}

ScheduleSpec ScheduleSpec::with_defaults(double eta, double beta2, std::int64_t t_max) {
    return ScheduleSpec{
        .eta = eta,
        .beta2 = beta2,
        .t_max = t_max,
        .t_warmup = default_phase_length(kWarmupFraction, t_max),
        .t_warmdown = default_phase_length(kWarmdownFraction, t_max),
    };
}

void ScheduleSpec::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("learning rate must be a finite positive number, got " +
                                    std::to_string(eta));
    }
    if (!(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("schedule beta2 must lie in [0, 1)");
    }
    if (t_max < 1) {
        throw std::invalid_argument("t_max must be >= 1, got " + std::to_string(t_max));
    }
    if (t_warmup < 1 || t_warmup > t_max) {
        throw std::invalid_argument("t_warmup must lie in [1, t_max], got " +
                                    std::to_string(t_warmup));
    }
    if (t_warmdown < 1 || t_warmdown > t_max) {
        throw std::invalid_argument("t_warmdown must lie in [1, t_max], got " +
                                    std::to_string(t_warmdown));
    }
}

double warmup_factor(std::int64_t t, const ScheduleSpec& spec) {
    require_in_range(t, spec);
    const double td = static_cast<double>(t);
    const double adaptive = (1.0 - spec.beta2) / 2.0 * td;
    const double linear = td / static_cast<double>(spec.t_warmup);
    return std::min(1.0, std::max(adaptive, linear));
}

double warmdown_factor(std::int64_t t, const ScheduleSpec& spec) {
    require_in_range(t, spec);
    return std::min(1.0, static_cast<double>(spec.t_max - t) / static_cast<double>(spec.t_warmdown));
}

double lr_factor(std::int64_t t, const ScheduleSpec& spec) {
    return std::min(warmup_factor(t, spec), warmdown_factor(t, spec));
}

}  // namespace ranger21
