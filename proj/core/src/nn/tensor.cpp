#include "scc/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace scc::nn {

std::string shape_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), values_(shape_size(shape_), fill) {
    for (auto d : shape_) {
        if (d == 0) throw ShapeError("tensor extents must be positive, got " + shape_string(shape_));
    }
}

Tensor::Tensor(Shape shape, std::vector<double> values) : Tensor(std::move(shape)) {
    if (values.size() != values_.size()) {
        throw ShapeError("tensor of shape " + shape_string(shape_) + " needs " + std::to_string(values_.size()) +
                         " values, got " + std::to_string(values.size()));
    }
    values_ = std::move(values);
}

Tensor Tensor::vector(std::vector<double> values) {
    const auto n = values.size();
    return Tensor({n}, std::move(values));
}

void Tensor::fill(double value) noexcept { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor Tensor::reshaped(Shape shape) const {
    if (shape_size(shape) != size()) {
        throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    }
    return Tensor(std::move(shape), values_);
}

void require_shape(const Tensor& t, const Shape& expected, std::string_view what) {
    if (t.shape() != expected) {
        throw ShapeError(std::string(what) + ": expected " + shape_string(expected) + ", got " + shape_string(t.shape()));
    }
}

void require_finite(const Tensor& t, std::string_view what) {
    if (!t.all_finite()) throw NumericError(std::string(what) + " contains non-finite values");
}

}  // namespace scc::nn
