#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranger21 {

using Shape = std::vector<std::size_t>;

/// Number of elements described by a shape.
std::size_t element_count(const Shape& shape);

/// Thrown when a tensor would hold NaN or an infinity.
class NonFiniteValue : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Named dense tensor of doubles in row-major order.
///
/// Holds one layer's parameters or one gradient. The constructor enforces the
/// invariants every downstream routine relies on: a non-empty shape with
/// positive extents, a matching value count, and finite values only.
class ParamTensor {
public:
    ParamTensor(std::string name, Shape shape, std::vector<double> values);

    static ParamTensor zeros(std::string name, Shape shape);
    static ParamTensor filled(std::string name, Shape shape, double value);

    const std::string& name() const noexcept { return name_; }
    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }

    /// Write access for the optimizer step and numerical oracles. Callers are
    /// responsible for keeping the values finite.
    std::span<double> mutable_values() noexcept { return values_; }

    /// Number of dim-0 slices ("units" / "rows").
    std::size_t rows() const noexcept { return shape_.front(); }
    /// Elements per dim-0 slice.
    std::size_t row_size() const noexcept { return values_.size() / shape_.front(); }
    std::span<const double> row(std::size_t i) const;

    /// Same name and shape, new values (validated).
    ParamTensor with_values(std::vector<double> values) const;
    /// Same values, new shape with the same element count.
    ParamTensor reshaped(Shape shape) const;

    bool same_shape(const ParamTensor& other) const noexcept { return shape_ == other.shape_; }

    friend bool operator==(const ParamTensor&, const ParamTensor&) = default;

private:
    std::string name_;
    Shape shape_;
    std::vector<double> values_;
};

double frobenius_norm(const ParamTensor& t);

/// Frobenius norm of each dim-0 slice; a rank-1 tensor yields one norm per element.
std::vector<double> row_norms(const ParamTensor& t);

/// Arithmetic mean of each dim-0 slice. Requires rank >= 2.
std::vector<double> mean_all_but_first(const ParamTensor& t);

/// Throws std::invalid_argument unless both tensors have identical shapes.
void require_same_shape(const ParamTensor& a, const ParamTensor& b, const char* what);

std::string shape_to_string(const Shape& shape);

}  // namespace ranger21
