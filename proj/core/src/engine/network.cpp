#include "scc/engine/network.hpp"

#include "scc/engine/planes.hpp"

namespace scc::engine {

void EngineConfig::validate() const {
    if (filters == 0 || conv_layers == 0 || state_dim == 0) {
        throw std::invalid_argument("engine config: filters, conv_layers and state_dim must be positive");
    }
}

nlohmann::json EngineConfig::to_json() const {
    return {{"filters", filters}, {"conv_layers", conv_layers}, {"state_dim", state_dim}, {"seed", seed},
            {"zero_init_heads", zero_init_heads}};
}

EngineConfig EngineConfig::from_json(const nlohmann::json& j) {
    EngineConfig c;
    c.filters = j.at("filters").get<std::size_t>();
    c.conv_layers = j.at("conv_layers").get<std::size_t>();
    c.state_dim = j.at("state_dim").get<std::size_t>();
    c.seed = j.value("seed", std::uint64_t{1});
    c.zero_init_heads = j.value("zero_init_heads", false);
    c.validate();
    return c;
}

EngineNet::EngineNet(const EngineConfig& config, std::string prefix) : config_(config), prefix_(std::move(prefix)) {
    config_.validate();
    nn::Rng rng(config_.seed);
    std::size_t channels = kPlaneCount;
    for (std::size_t i = 0; i < config_.conv_layers; ++i) {
        convs_.emplace_back(prefix_ + "/conv" + std::to_string(i), channels, config_.filters, rng);
        channels = config_.filters;
    }
    trunk_ = std::make_unique<nn::Dense>(prefix_ + "/trunk", channels * 64, config_.state_dim, rng);
    policy_ = std::make_unique<nn::Dense>(prefix_ + "/policy", config_.state_dim, kPolicySize, rng);
    value_ = std::make_unique<nn::Dense>(prefix_ + "/value", config_.state_dim, 1, rng);
    if (config_.zero_init_heads) zero_heads();
}

nn::Var EngineNet::board_state(nn::Graph& g, const chess::Board& board) const {
    nn::Var x = g.constant(encode_planes(board).planes);
    for (const auto& conv : convs_) x = g.silu(conv(g, x));
    x = g.reshape(x, {g.value(x).size()});
    return g.tanh((*trunk_)(g, x));
}

nn::Var EngineNet::win_rate(nn::Graph& g, nn::Var state) const { return g.sigmoid((*value_)(g, state)); }

nn::Var EngineNet::policy_logits(nn::Graph& g, nn::Var state, const chess::Board& board,
                                 const std::vector<chess::Move>& moves) const {
    std::vector<std::size_t> rows;
    rows.reserve(moves.size());
    for (const auto& m : moves) rows.push_back(oriented_policy_index(m, board.side_to_move()));
    return policy_->rows(g, state, std::move(rows));
}

nn::ParameterList EngineNet::parameters() const {
    nn::ParameterList out;
    for (const auto& c : convs_) c.collect(out);
    trunk_->collect(out);
    policy_->collect(out);
    value_->collect(out);
    return out;
}

void EngineNet::zero_heads() const {
    policy_->zero();
    value_->zero();
}

std::shared_ptr<EngineNet> EngineNet::clone(std::optional<std::string> prefix) const {
    auto copy = std::make_shared<EngineNet>(config_, prefix.value_or(prefix_));
    copy->copy_parameters_from(*this);
    return copy;
}

void EngineNet::copy_parameters_from(const EngineNet& other) const {
    const auto src = other.parameters();
    const auto dst = parameters();
    if (src.size() != dst.size()) throw std::invalid_argument("engine architectures differ");
    for (std::size_t i = 0; i < src.size(); ++i) {
        auto& to = *dst.items()[i];
        const auto& from = *src.items()[i];
        if (to.value.shape() != from.value.shape()) {
            throw nn::ShapeError("engine parameter " + to.name + ": " + nn::shape_string(from.value.shape()) + " vs " +
                                 nn::shape_string(to.value.shape()));
        }
        to.value = from.value;
    }
}

nlohmann::json EngineNet::header() const {
    return {{"kind", "engine"}, {"prefix", prefix_}, {"config", config_.to_json()}};
}

nn::Checkpoint EngineNet::to_checkpoint() const { return nn::make_checkpoint(header(), parameters().items()); }

void EngineNet::save(const std::filesystem::path& path) const { nn::save_checkpoint(path, to_checkpoint()); }

std::shared_ptr<EngineNet> EngineNet::from_checkpoint(const nn::Checkpoint& ckpt) {
    if (ckpt.header.value("kind", "") != "engine") throw nn::CheckpointError("checkpoint is not an engine checkpoint");
    auto net = std::make_shared<EngineNet>(EngineConfig::from_json(ckpt.header.at("config")),
                                           ckpt.header.value("prefix", "engine"));
    nn::restore_parameters(ckpt, net->parameters().items());
    return net;
}

std::shared_ptr<EngineNet> EngineNet::load(const std::filesystem::path& path) {
    return from_checkpoint(nn::load_checkpoint(path));
}

}  // namespace scc::engine
