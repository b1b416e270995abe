#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ranger21::problems {

struct LossAndLogitGrad {
    double loss = 0.0;
    std::vector<double> grad_logits;
};

/// Cross-entropy of softmax(logits) against the smoothed target
/// (1 - alpha) * onehot(target) + alpha / C. The gradient with respect to the
/// logits is softmax(logits) - smoothed target.
LossAndLogitGrad label_smoothed_ce(std::span<const double> logits, std::size_t target, double alpha);

/// Writes the logit gradient into `grad` (same length as logits) and returns the loss.
double label_smoothed_ce_into(std::span<const double> logits, std::size_t target, double alpha,
                              std::span<double> grad);

/// Entropy of the smoothed target distribution: the loss lower bound.
double smoothed_target_entropy(std::size_t classes, double alpha);

}  // namespace ranger21::problems
