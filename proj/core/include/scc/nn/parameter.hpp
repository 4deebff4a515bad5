#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scc/nn/tensor.hpp"

namespace scc::nn {

using Rng = std::mt19937_64;

/// A named trainable tensor and its accumulated gradient.
struct Parameter {
    Parameter(std::string name, Shape shape);

    std::string name;
    Tensor value;
    Tensor grad;
    /// Frozen parameters receive no gradient during backward.
    bool trainable = true;

    void zero_grad() noexcept { grad.fill(0.0); }
};

using ParameterPtr = std::shared_ptr<Parameter>;

ParameterPtr make_parameter(std::string name, Shape shape);

/// Uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))).
void init_xavier_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Ordered collection of distinct parameters. Adding the same object twice is
/// a no-op (shared components); two different objects with one name is an error.
class ParameterList {
public:
    void add(const ParameterPtr& p);
    void add(std::span<const ParameterPtr> ps);
    void add(const ParameterList& other) { add(other.items()); }

    std::span<const ParameterPtr> items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    ParameterPtr find(const std::string& name) const;
    std::size_t scalar_count() const noexcept;

    void zero_grad() const;
    void set_trainable(bool trainable) const;

private:
    std::vector<ParameterPtr> items_;
    std::unordered_map<std::string, Parameter*> by_name_;
};

}  // namespace scc::nn
