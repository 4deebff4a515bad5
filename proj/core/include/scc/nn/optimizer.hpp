#pragma once

#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "scc/nn/parameter.hpp"

namespace scc::nn {

struct OptimizerConfig {
    enum class Method { sgd_momentum, adam };

    Method method = Method::adam;
    double learning_rate = 1e-3;
    double momentum = 0.9;  // sgd_momentum only; 0 gives plain SGD
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Global L2 norm cap; use infinity to disable.
    double gradient_clip_norm = 5.0;

    void validate() const;
};

/// Stateful first-order optimizer (momentum buffers / Adam moments are keyed
/// by parameter identity).
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig config);

    /// Clips the global gradient norm, updates every trainable parameter in
    /// place and zeroes all gradients. Returns the pre-clip norm. Throws
    /// NumericError naming the first parameter with a non-finite gradient.
    double step(std::span<const ParameterPtr> params);

    const OptimizerConfig& config() const noexcept { return config_; }
    long steps_taken() const noexcept { return steps_; }

private:
    struct Slot {
        std::vector<double> first;
        std::vector<double> second;
    };

    OptimizerConfig config_;
    long steps_ = 0;
    std::unordered_map<const Parameter*, Slot> slots_;
};

/// One update with a fresh optimizer (no momentum history).
double optimizer_step(std::span<const ParameterPtr> params, const OptimizerConfig& config);

}  // namespace scc::nn
