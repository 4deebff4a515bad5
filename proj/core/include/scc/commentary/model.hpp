#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scc/commentary/category.hpp"
#include "scc/encoders/context.hpp"
#include "scc/encoders/move_encoder.hpp"
#include "scc/engine/engine.hpp"

namespace scc::commentary {

enum class Mode { single, mult };
std::string_view to_string(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

struct ModelConfig {
    engine::EngineConfig engine{};       // engine.state_dim is the context width d
    encoders::MoveEncoderConfig move_encoder{};  // width is forced to d
    std::size_t decoder_hidden = 256;
    std::size_t word_width = 128;
    std::size_t vocab_size = 0;
    std::uint64_t seed = 1;

    std::size_t width() const noexcept { return engine.state_dim; }
    void validate() const;
    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
};

class CommentaryError : public std::runtime_error {
public:
    enum class Kind { no_continuation, illegal_move, bad_token };
    CommentaryError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Components shared by all categories in mult mode and owned per category
/// otherwise: the engine, the move encoder, the experience vector g and W_val.
struct SharedComponents {
    SharedComponents(const std::string& prefix, const ModelConfig& config, bool with_choices, nn::Rng& rng);

    std::shared_ptr<engine::EngineNet> engine;
    encoders::MoveEncoder move_encoder;
    std::optional<encoders::MultiChoiceEncoder> mce;
    std::optional<encoders::ValueEmbedding> value;  // W_val

    /// `choices` false leaves out g and W_val.
    void collect(nn::ParameterList& out, bool choices = true) const;
};

/// Per-category LSTM decoder with bilinear attention over its context.
struct Decoder {
    Decoder(const std::string& prefix, Category category, const ModelConfig& config, nn::Rng& rng);

    Category category;
    nn::Embedding words;
    nn::Dense start;  // projects E_S0 into the first input
    nn::LstmCell lstm;
    encoders::Attention attention;
    nn::Dense output;  // [h; z] -> vocabulary logits
    std::optional<encoders::DiffEmbedding> diff;  // W_diff, quality only

    void collect(nn::ParameterList& out) const;
};

class CommentaryModel {
public:
    /// Engine weights are copied from `pretrained` when given (its config then
    /// overrides config.engine).
    CommentaryModel(ModelConfig config, Mode mode, std::vector<Category> categories,
                    const engine::EngineNet* pretrained = nullptr);

    const ModelConfig& config() const noexcept { return config_; }
    Mode mode() const noexcept { return mode_; }
    const std::vector<Category>& categories() const noexcept { return categories_; }
    bool has(Category c) const { return decoders_.count(c) != 0; }

    const SharedComponents& shared(Category c) const;
    const Decoder& decoder(Category c) const;
    engine::Engine engine(Category c) const { return engine::Engine(shared(c).engine); }

    /// Every parameter, each shared one listed once.
    nn::ParameterList parameters() const;
    /// Parameters that take part in category `c`.
    nn::ParameterList parameters(Category c) const;
    nn::ParameterList engine_parameters() const;

    nlohmann::json header() const;
    nn::Checkpoint to_checkpoint() const;
    static std::shared_ptr<CommentaryModel> from_checkpoint(const nn::Checkpoint& ckpt);

private:
    ModelConfig config_;
    Mode mode_;
    std::vector<Category> categories_;
    std::map<Category, std::shared_ptr<SharedComponents>> shared_;
    std::map<Category, std::unique_ptr<Decoder>> decoders_;
};

/// Discrete engine decisions behind one sample's context: b1 = m0(b0), the
/// alternative m^0 with its board, and the argmax rollout after b1.
struct Continuations {
    chess::Board before;
    chess::Move move;
    chess::Board after;
    std::optional<engine::Alternative> alternative;
    std::optional<chess::Board> alternative_after;
    std::vector<std::pair<chess::Board, chess::Move>> rollout;  // (b2, m1), (b3, m2), ...
};

/// Computes what `category` needs. Throws CommentaryError: illegal_move, or
/// no_continuation for planning when b1 is terminal.
Continuations plan_continuations(const engine::Engine& engine, const chess::Board& board, const chess::Move& move,
                                 Category category, int horizon = 4);

/// Attention memory for one sample: a row set (description, quality) or a
/// list of choices (comparison, planning, contexts).
struct Context {
    encoders::ContextRows rows;
    nn::Var stacked;  // rows stacked [n, d]; invalid for choice categories
    std::vector<encoders::Choice> choices;
    nn::Var initial_state;  // E_S0
};

Context build_context(nn::Graph& g, const CommentaryModel& model, Category category, const Continuations& cont);

/// z for decoder hidden state h.
nn::Var attend_context(nn::Graph& g, const CommentaryModel& model, Category category, const Context& context,
                       nn::Var h);

struct GenerationLoss {
    nn::Var loss;                 // mean per-token cross entropy, EOS included
    std::vector<nn::Var> logits;  // one per target token
};

/// Teacher-forced loss of `tokens` (word ids ending with EOS).
GenerationLoss generation_loss(nn::Graph& g, const CommentaryModel& model, Category category,
                               const Continuations& cont, const std::vector<std::size_t>& tokens);

struct GenerationConfig {
    enum class Method { greedy, beam };
    Method method = Method::beam;
    std::size_t beam_width = 4;
    std::size_t max_tokens = 50;
    double length_penalty = 0.6;

    void validate() const;
};

/// Decoded word ids without the end marker; at most max_tokens long.
std::vector<std::size_t> generate(const CommentaryModel& model, Category category, const Continuations& cont,
                                  const GenerationConfig& config);

}  // namespace scc::commentary
