#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scc::nn {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a non-finite value appears where the contract forbids it.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major tensor of doubles.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> values);

    static Tensor vector(std::vector<double> values);
    static Tensor vector(std::initializer_list<double> values) { return vector(std::vector<double>(values)); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    /// Rank-2 element access.
    double& at(std::size_t row, std::size_t col) { return values_[row * shape_.at(1) + col]; }
    double at(std::size_t row, std::size_t col) const { return values_[row * shape_.at(1) + col]; }

    void fill(double value) noexcept;
    bool all_finite() const noexcept;
    Tensor reshaped(Shape shape) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> values_;
};

/// Throws ShapeError("<what>: expected [..], got [..]") on mismatch.
void require_shape(const Tensor& t, const Shape& expected, std::string_view what);

/// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(const Tensor& t, std::string_view what);

}  // namespace scc::nn
