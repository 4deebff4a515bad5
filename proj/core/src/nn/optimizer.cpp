#include "scc/nn/optimizer.hpp"

#include <cmath>

namespace scc::nn {

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("optimizer learning_rate must be > 0");
    if (!(gradient_clip_norm > 0)) throw std::invalid_argument("optimizer gradient_clip_norm must be > 0");
    if (momentum < 0 || momentum >= 1) throw std::invalid_argument("optimizer momentum must be in [0,1)");
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) throw std::invalid_argument("optimizer betas must be in [0,1)");
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

double Optimizer::step(std::span<const ParameterPtr> params) {
    double sq = 0.0;
    for (const auto& p : params) {
        if (!p->trainable) continue;
        for (double g : p->grad.values()) {
            if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter '" + p->name + "'");
            sq += g * g;
        }
    }
    const double norm = std::sqrt(sq);
    const double clip = norm > config_.gradient_clip_norm ? config_.gradient_clip_norm / norm : 1.0;

    ++steps_;
    const double lr = config_.learning_rate;
    for (const auto& p : params) {
        if (!p->trainable) {
            p->zero_grad();
            continue;
        }
        auto values = p->value.values();
        auto grads = p->grad.values();
        auto& slot = slots_[p.get()];
        if (slot.first.size() != values.size()) slot.first.assign(values.size(), 0.0);

        if (config_.method == OptimizerConfig::Method::sgd_momentum) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                slot.first[i] = config_.momentum * slot.first[i] + clip * grads[i];
                values[i] -= lr * slot.first[i];
            }
        } else {
            if (slot.second.size() != values.size()) slot.second.assign(values.size(), 0.0);
            const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
            const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double g = clip * grads[i];
                if (g == 0.0 && slot.first[i] == 0.0 && slot.second[i] == 0.0) continue;
                slot.first[i] = config_.beta1 * slot.first[i] + (1 - config_.beta1) * g;
                slot.second[i] = config_.beta2 * slot.second[i] + (1 - config_.beta2) * g * g;
                values[i] -= lr * (slot.first[i] / c1) / (std::sqrt(slot.second[i] / c2) + config_.epsilon);
            }
        }
        p->zero_grad();
    }
    return norm;
}

double optimizer_step(std::span<const ParameterPtr> params, const OptimizerConfig& config) {
    Optimizer opt(config);
    return opt.step(params);
}

}  // namespace scc::nn
