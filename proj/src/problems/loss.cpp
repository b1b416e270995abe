#include "ranger21/problems/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ranger21::problems {

double label_smoothed_ce_into(std::span<const double> logits, std::size_t target, double alpha,
                              std::span<double> grad) {
    const std::size_t classes = logits.size();
    if (classes < 2) {
        throw std::invalid_argument("label_smoothed_ce: need at least two classes");
    }
    if (target >= classes) {
        throw std::out_of_range("label_smoothed_ce: target " + std::to_string(target) +
                                " outside [0, " + std::to_string(classes) + ")");
    }
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("label_smoothed_ce: alpha must lie in [0, 1)");
    }
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double z : logits) {
        denom += std::exp(z - max_logit);
    }
    const double log_denom = std::log(denom);
    const double off_target = alpha / static_cast<double>(classes);
    double loss = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        const double log_p = logits[c] - max_logit - log_denom;
        const double q = c == target ? 1.0 - alpha + off_target : off_target;
        loss -= q * log_p;
        grad[c] = std::exp(log_p) - q;
    }
    return loss;
}

LossAndLogitGrad label_smoothed_ce(std::span<const double> logits, std::size_t target, double alpha) {
    LossAndLogitGrad out{0.0, std::vector<double>(logits.size())};
    out.loss = label_smoothed_ce_into(logits, target, alpha, out.grad_logits);
    return out;
}

double smoothed_target_entropy(std::size_t classes, double alpha) {
    const double c = static_cast<double>(classes);
    const double off = alpha / c;
    const double on = 1.0 - alpha + off;
    double h = -on * std::log(on);
    if (off > 0.0) {
        h -= (c - 1.0) * off * std::log(off);
    }
    return h;
}

}  // namespace ranger21::problems
