#include "scc/nn/parameter.hpp"

#include <cmath>

namespace scc::nn {

Parameter::Parameter(std::string n, Shape shape) : name(std::move(n)), value(shape), grad(shape) {}

ParameterPtr make_parameter(std::string name, Shape shape) {
    return std::make_shared<Parameter>(std::move(name), std::move(shape));
}

void init_xavier_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : p.value.values()) v = dist(rng);
}

void ParameterList::add(const ParameterPtr& p) {
    auto [it, inserted] = by_name_.emplace(p->name, p.get());
    if (!inserted) {
        if (it->second != p.get()) throw std::invalid_argument("duplicate parameter name '" + p->name + "'");
        return;
    }
    items_.push_back(p);
}

void ParameterList::add(std::span<const ParameterPtr> ps) {
    for (const auto& p : ps) add(p);
}

ParameterPtr ParameterList::find(const std::string& name) const {
    for (const auto& p : items_) {
        if (p->name == name) return p;
    }
    return nullptr;
}

std::size_t ParameterList::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : items_) n += p->value.size();
    return n;
}

void ParameterList::zero_grad() const {
    for (const auto& p : items_) p->zero_grad();
}

void ParameterList::set_trainable(bool trainable) const {
    for (const auto& p : items_) p->trainable = trainable;
}

}  // namespace scc::nn
