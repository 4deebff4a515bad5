#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scc/chess/board.hpp"
#include "scc/nn/checkpoint.hpp"
#include "scc/nn/layers.hpp"

namespace scc::engine {

struct EngineConfig {
    std::size_t filters = 64;
    std::size_t conv_layers = 4;
    std::size_t state_dim = 128;  // width d of E_S
    std::uint64_t seed = 1;
    /// Start policy and value heads at zero (uniform policy, win rate 0.5).
    bool zero_init_heads = false;

    void validate() const;
    nlohmann::json to_json() const;
    static EngineConfig from_json(const nlohmann::json& j);
};

/// The engine's parameters and differentiable forward pass:
/// planes -> conv trunk -> E_S -> (policy logits over legal moves, win rate).
class EngineNet {
public:
    explicit EngineNet(const EngineConfig& config, std::string prefix = "engine");

    const EngineConfig& config() const noexcept { return config_; }
    const std::string& prefix() const noexcept { return prefix_; }

    /// E_S for `board` (defined for terminal boards too), shape [d].
    nn::Var board_state(nn::Graph& g, const chess::Board& board) const;
    /// Win rate for the side to move, sigmoid output of shape [1].
    nn::Var win_rate(nn::Graph& g, nn::Var state) const;
    /// Logits for `moves` (legal on `board`), in the same order.
    nn::Var policy_logits(nn::Graph& g, nn::Var state, const chess::Board& board,
                          const std::vector<chess::Move>& moves) const;

    nn::ParameterList parameters() const;
    void zero_heads() const;

    /// Deep copy with identical parameter values; `prefix` defaults to ours.
    std::shared_ptr<EngineNet> clone(std::optional<std::string> prefix = std::nullopt) const;
    /// Copies parameter values from a network of the same architecture.
    void copy_parameters_from(const EngineNet& other) const;

    nlohmann::json header() const;
    nn::Checkpoint to_checkpoint() const;
    void save(const std::filesystem::path& path) const;
    static std::shared_ptr<EngineNet> load(const std::filesystem::path& path);
    static std::shared_ptr<EngineNet> from_checkpoint(const nn::Checkpoint& ckpt);

private:
    EngineConfig config_;
    std::string prefix_;
    std::vector<nn::Conv2d> convs_;
    std::unique_ptr<nn::Dense> trunk_;
    std::unique_ptr<nn::Dense> policy_;
    std::unique_ptr<nn::Dense> value_;
};

}  // namespace scc::engine
