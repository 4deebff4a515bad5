#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scc/nn/graph.hpp"

namespace scc::nn {

struct GradientCheckOptions {
    double epsilon = 1e-5;
    double tolerance = 1e-4;
    /// Coordinates sampled per parameter (all coordinates when the parameter is smaller).
    std::size_t coordinates_per_parameter = 12;
    std::uint64_t seed = 0;
    /// Relative error is |a - n| / max(|a|, |n|, floor); the floor keeps
    /// round-off in near-zero gradients from reading as large relative error.
    double denominator_floor = 1e-6;
};

struct GradientCheckEntry {
    std::string parameter;
    std::size_t index = 0;
    double analytic = 0;
    double numeric = 0;
    double relative_error = 0;
};

struct GradientCheckReport {
    double max_relative_error = 0;
    std::size_t coordinates_checked = 0;
    GradientCheckEntry worst;
    std::vector<GradientCheckEntry> failures;
    bool passed = true;

    std::string summary() const;
};

/// Builds a scalar loss on the given graph from the current parameter values.
using LossBuilder = std::function<Var(Graph&)>;

/// Central-difference check of the analytic gradient of `loss` with respect to
/// `params`. Parameter values are restored afterwards; parameter gradients are
/// left zeroed.
GradientCheckReport gradient_check(const LossBuilder& loss, std::span<const ParameterPtr> params,
                                   const GradientCheckOptions& options = {});

}  // namespace scc::nn
