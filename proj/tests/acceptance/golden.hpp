#pragma once

// Values frozen from oracle runs of this build. A change here means the
// trajectories changed and needs an explanation.

#include <cstdint>
#include <optional>

namespace golden {

// Rosenbrock from (-1.5, 2.0), eta 3e-3, logged every step: first step with
// f <= 12.5e-4. Ranger21 never gets there within 20000 steps.
inline constexpr std::optional<std::int64_t> kRosenbrockStepsAdamW = 4824;
inline constexpr std::optional<std::int64_t> kRosenbrockStepsRanger21 = std::nullopt;

// Deep tanh MLP (configs/deep_mlp.json), median final training loss over run seeds 1..5.
inline constexpr double kDeepMedianAdamW = 0.51114493711649123;
inline constexpr double kDeepMedianRanger21 = 0.7191899767660257;

}  // namespace golden
