#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace ranger21::problems {

/// Seeded generator for datasets, weight init and minibatch order.
///
/// Raw bits come from std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The conversions below are spelled out here rather than taken
/// from <random>'s distributions, whose algorithms vary between standard
/// libraries:
///   uniform()  = (bits >> 11) * 2^-53, in [0, 1)
///   normal()   = Marsaglia polar method on uniform(-1, 1) pairs, caching the
///                second variate
///   below(n)   = rejection sampling on the top bits, unbiased
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    std::size_t below(std::size_t n);

    /// Fisher-Yates shuffle driven by below().
    template <typename T>
    void shuffle(std::span<T> xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(xs[i - 1], xs[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ranger21::problems
