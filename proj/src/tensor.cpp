#include "ranger21/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "ranger21/simd/kernels.hpp"

namespace ranger21 {

std::size_t element_count(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t extent : shape) {
        n *= extent;
    }
    return n;
}

std::string shape_to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << (i ? "," : "") << shape[i];
    }
    os << ']';
    return os.str();
}

ParamTensor::ParamTensor(std::string name, Shape shape, std::vector<double> values)
    : name_(std::move(name)), shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_.empty()) {
        throw std::invalid_argument("tensor '" + name_ + "': shape must be non-empty");
    }
    for (std::size_t extent : shape_) {
        if (extent == 0) {
            throw std::invalid_argument("tensor '" + name_ + "': extents must be >= 1, got " +
                                        shape_to_string(shape_));
        }
    }
    if (element_count(shape_) != values_.size()) {
        throw std::invalid_argument("tensor '" + name_ + "': shape " + shape_to_string(shape_) +
                                    " needs " + std::to_string(element_count(shape_)) +
                                    " values, got " + std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NonFiniteValue("tensor '" + name_ + "': non-finite value at index " +
                                 std::to_string(i));
        }
    }
}

ParamTensor ParamTensor::zeros(std::string name, Shape shape) {
    return filled(std::move(name), std::move(shape), 0.0);
}

ParamTensor ParamTensor::filled(std::string name, Shape shape, double value) {
    const std::size_t n = element_count(shape);
    return ParamTensor(std::move(name), std::move(shape), std::vector<double>(n, value));
}

std::span<const double> ParamTensor::row(std::size_t i) const {
    const std::size_t width = row_size();
    return std::span<const double>(values_).subspan(i * width, width);
}

ParamTensor ParamTensor::with_values(std::vector<double> values) const {
    return ParamTensor(name_, shape_, std::move(values));
}

ParamTensor ParamTensor::reshaped(Shape shape) const {
    return ParamTensor(name_, std::move(shape), values_);
}

void require_same_shape(const ParamTensor& a, const ParamTensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch between '" + a.name() +
                                    "' " + shape_to_string(a.shape()) + " and '" + b.name() +
                                    "' " + shape_to_string(b.shape()));
    }
}

double frobenius_norm(const ParamTensor& t) {
    return std::sqrt(simd::kernels().sum_squares(t.values()));
}

std::vector<double> row_norms(const ParamTensor& t) {
    const auto& k = simd::kernels();
    std::vector<double> norms(t.rows());
    for (std::size_t i = 0; i < norms.size(); ++i) {
        norms[i] = std::sqrt(k.sum_squares(t.row(i)));
    }
    return norms;
}

std::vector<double> mean_all_but_first(const ParamTensor& t) {
    if (t.rank() < 2) {
        throw std::invalid_argument("mean_all_but_first: tensor '" + t.name() +
                                    "' has rank 1; a slice mean needs rank >= 2");
    }
    const auto& k = simd::kernels();
    const double width = static_cast<double>(t.row_size());
    std::vector<double> means(t.rows());
    for (std::size_t i = 0; i < means.size(); ++i) {
        means[i] = k.sum(t.row(i)) / width;
    }
    return means;
}

}  // namespace ranger21
