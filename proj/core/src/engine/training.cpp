#include "scc/engine/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace scc::engine {

void TrainConfig::validate() const {
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
    optimizer.validate();
}

namespace {

// Portable Fisher-Yates (std::shuffle's sequence differs between libraries).
void shuffle(std::vector<std::size_t>& order, nn::Rng& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

}  // namespace

TrainReport train_supervised(const EngineNet& net, std::span<const TrainingTuple> tuples, const TrainConfig& config) {
    config.validate();
    if (tuples.empty()) throw std::invalid_argument("no training tuples");

    TrainReport report;
    nn::Rng rng(config.seed);
    nn::Optimizer optimizer(config.optimizer);
    const auto params = net.parameters();
    params.zero_grad();

    std::vector<std::size_t> order(tuples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = order.size();
    std::vector<TrainingTuple> batch;

    for (long step = 1; step <= config.steps; ++step) {
        batch.clear();
        while (batch.size() < std::min(config.batch_size, tuples.size())) {
            if (cursor == order.size()) {
                shuffle(order, rng);
                cursor = 0;
            }
            batch.push_back(tuples[order[cursor++]]);
        }

        nn::Graph g;
        const auto loss = engine_loss(g, net, batch).total;
        const double value = g.scalar_value(loss);
        if (!std::isfinite(value)) {
            report.aborted = "non-finite loss at step " + std::to_string(step);
            break;
        }
        g.backward(loss);
        try {
            optimizer.step(params.items());
        } catch (const nn::NumericError& e) {
            params.zero_grad();
            report.aborted = "step " + std::to_string(step) + ": " + e.what();
            break;
        }
        report.losses.push_back(value);
        report.steps_completed = step;
        for (const long s : config.snapshot_steps) {
            if (s == step) report.snapshots.emplace(step, net.to_checkpoint());
        }
    }
    return report;
}

void write_loss_curve(const std::filesystem::path& path, std::span<const double> losses) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "step,loss\n";
    out.precision(10);
    for (std::size_t i = 0; i < losses.size(); ++i) out << i + 1 << ',' << losses[i] << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

SmoothedLoss smoothed_loss(std::span<const double> losses, std::size_t window) {
    if (losses.empty() || window == 0) throw std::invalid_argument("smoothing needs losses and a positive window");
    window = std::min(window, losses.size());
    const auto mean = [](std::span<const double> xs) {
        return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    };
    return {mean(losses.first(window)), mean(losses.last(window))};
}

}  // namespace scc::engine
