#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scc/engine/engine.hpp"
#include "scc/nn/optimizer.hpp"

namespace scc::engine {

struct TrainConfig {
    long steps = 1000;
    std::size_t batch_size = 32;
    std::uint64_t seed = 7;
    nn::OptimizerConfig optimizer{};
    /// Steps after which a copy of the network is kept (e.g. a weak engine at 5%).
    std::vector<long> snapshot_steps;

    void validate() const;
};

struct TrainReport {
    std::vector<double> losses;  // one per completed step
    long steps_completed = 0;
    /// Set when training stopped on a non-finite loss or gradient; the
    /// network then holds the parameters of the last finite step.
    std::optional<std::string> aborted;
    std::map<long, nn::Checkpoint> snapshots;
};

/// Minibatch Adam on engine_loss over epoch-wise shuffles of `tuples`.
/// Updates `net` in place; identical inputs and seed give identical results.
TrainReport train_supervised(const EngineNet& net, std::span<const TrainingTuple> tuples, const TrainConfig& config);

/// "step,loss" records with a header line, steps numbered from 1.
void write_loss_curve(const std::filesystem::path& path, std::span<const double> losses);

/// Mean of the first and last `window` losses.
struct SmoothedLoss {
    double initial;
    double final;
};
SmoothedLoss smoothed_loss(std::span<const double> losses, std::size_t window);

}  // namespace scc::engine
