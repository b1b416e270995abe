#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ranger21/tensor.hpp"

namespace testing {

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(rng);
    }
    return v;
}

inline ranger21::Shape random_shape(std::mt19937_64& rng, std::size_t rank, std::size_t max_extent) {
    std::uniform_int_distribution<std::size_t> extent(1, max_extent);
    ranger21::Shape s(rank);
    for (auto& e : s) {
        e = extent(rng);
    }
    return s;
}

inline ranger21::ParamTensor random_tensor(std::mt19937_64& rng, const ranger21::Shape& shape,
                                           double lo = -1.0, double hi = 1.0) {
    return ranger21::ParamTensor("t", shape, random_values(rng, ranger21::element_count(shape), lo, hi));
}

}  // namespace testing
