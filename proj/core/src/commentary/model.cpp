#include "scc/commentary/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scc/data/commentary_data.hpp"

namespace scc::commentary {

using data::Vocabulary;

std::string_view to_string(Mode m) noexcept { return m == Mode::single ? "single" : "mult"; }

std::optional<Mode> parse_mode(std::string_view text) noexcept {
    if (text == "single" || text == "per_category") return Mode::single;
    if (text == "mult") return Mode::mult;
    return std::nullopt;
}

void ModelConfig::validate() const {
    engine.validate();
    if (decoder_hidden == 0 || word_width == 0 || move_encoder.hidden == 0 || move_encoder.token_width == 0) {
        throw std::invalid_argument("commentary model widths must be positive");
    }
    if (vocab_size <= Vocabulary::kSpecials) throw std::invalid_argument("vocabulary has no words");
}

nlohmann::json ModelConfig::to_json() const {
    return {{"engine", engine.to_json()},
            {"move_encoder", {{"token_width", move_encoder.token_width}, {"hidden", move_encoder.hidden}}},
            {"decoder_hidden", decoder_hidden},
            {"word_width", word_width},
            {"vocab_size", vocab_size},
            {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.engine = engine::EngineConfig::from_json(j.at("engine"));
    c.move_encoder.token_width = j.at("move_encoder").at("token_width").get<std::size_t>();
    c.move_encoder.hidden = j.at("move_encoder").at("hidden").get<std::size_t>();
    c.decoder_hidden = j.at("decoder_hidden").get<std::size_t>();
    c.word_width = j.at("word_width").get<std::size_t>();
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.seed = j.value("seed", std::uint64_t{1});
    c.validate();
    return c;
}

namespace {

encoders::MoveEncoderConfig move_config(const ModelConfig& config) {
    auto c = config.move_encoder;
    c.width = config.width();
    return c;
}

}  // namespace

SharedComponents::SharedComponents(const std::string& prefix, const ModelConfig& config, bool with_choices,
                                   nn::Rng& rng)
    : engine(std::make_shared<engine::EngineNet>(config.engine, prefix + "engine")),
      move_encoder(prefix + "move_encoder", move_config(config), rng) {
    if (with_choices) {
        mce.emplace(prefix + "mce", config.width(), rng);
        value.emplace(prefix + "mce/W_val", config.width(), rng);
    }
}

void SharedComponents::collect(nn::ParameterList& out, bool choices) const {
    out.add(engine->parameters());
    move_encoder.collect(out);
    if (mce && choices) mce->collect(out);
    if (value && choices) value->collect(out);
}

Decoder::Decoder(const std::string& prefix, Category c, const ModelConfig& config, nn::Rng& rng)
    : category(c),
      words(prefix + "/words", config.vocab_size, config.word_width, rng),
      start(prefix + "/start", config.width(), config.word_width, rng),
      lstm(prefix + "/lstm", config.word_width, config.decoder_hidden, rng),
      attention(prefix + "/attention", config.width(), config.decoder_hidden, rng),
      output(prefix + "/output", config.decoder_hidden + config.width(), config.vocab_size, rng) {
    if (c == Category::quality) diff.emplace("quality/W_diff", config.width(), rng);
}

void Decoder::collect(nn::ParameterList& out) const {
    words.collect(out);
    start.collect(out);
    lstm.collect(out);
    attention.collect(out);
    output.collect(out);
    if (diff) diff->collect(out);
}

CommentaryModel::CommentaryModel(ModelConfig config, Mode mode, std::vector<Category> categories,
                                 const engine::EngineNet* pretrained)
    : config_(std::move(config)), mode_(mode), categories_(std::move(categories)) {
    if (pretrained) config_.engine = pretrained->config();
    config_.validate();
    if (categories_.empty()) throw std::invalid_argument("a commentary model needs at least one category");
    std::sort(categories_.begin(), categories_.end());
    categories_.erase(std::unique(categories_.begin(), categories_.end()), categories_.end());

    nn::Rng rng(config_.seed);
    if (mode_ == Mode::mult) {
        auto shared = std::make_shared<SharedComponents>("", config_, true, rng);
        for (const auto c : categories_) shared_[c] = shared;
    } else {
        for (const auto c : categories_) {
            shared_[c] = std::make_shared<SharedComponents>(std::string(to_string(c)) + "/", config_, uses_choices(c),
                                                            rng);
        }
    }
    for (const auto c : categories_) {
        decoders_[c] = std::make_unique<Decoder>(std::string(to_string(c)) + "/decoder", c, config_, rng);
    }
    if (pretrained) {
        for (const auto& [c, shared] : shared_) shared->engine->copy_parameters_from(*pretrained);
    }
}

const SharedComponents& CommentaryModel::shared(Category c) const {
    const auto it = shared_.find(c);
    if (it == shared_.end()) throw std::invalid_argument("model has no " + std::string(to_string(c)) + " category");
    return *it->second;
}

const Decoder& CommentaryModel::decoder(Category c) const {
    const auto it = decoders_.find(c);
    if (it == decoders_.end()) throw std::invalid_argument("model has no " + std::string(to_string(c)) + " category");
    return *it->second;
}

nn::ParameterList CommentaryModel::parameters() const {
    nn::ParameterList out;
    for (const auto c : categories_) out.add(parameters(c));
    return out;
}

nn::ParameterList CommentaryModel::parameters(Category c) const {
    nn::ParameterList out;
    shared(c).collect(out, uses_choices(c));
    decoder(c).collect(out);
    return out;
}

nn::ParameterList CommentaryModel::engine_parameters() const {
    nn::ParameterList out;
    for (const auto c : categories_) out.add(shared(c).engine->parameters());
    return out;
}

nlohmann::json CommentaryModel::header() const {
    nlohmann::json cats = nlohmann::json::array();
    for (const auto c : categories_) cats.push_back(std::string(to_string(c)));
    return {{"kind", "commentary"}, {"mode", std::string(to_string(mode_))}, {"categories", cats},
            {"config", config_.to_json()}};
}

nn::Checkpoint CommentaryModel::to_checkpoint() const { return nn::make_checkpoint(header(), parameters().items()); }

std::shared_ptr<CommentaryModel> CommentaryModel::from_checkpoint(const nn::Checkpoint& ckpt) {
    if (ckpt.header.value("kind", "") != "commentary") {
        throw nn::CheckpointError("checkpoint is not a commentary model");
    }
    const auto mode = parse_mode(ckpt.header.at("mode").get<std::string>());
    if (!mode) throw nn::CheckpointError("unknown commentary mode in checkpoint");
    std::vector<Category> cats;
    for (const auto& name : ckpt.header.at("categories")) {
        const auto c = parse_category(name.get<std::string>());
        if (!c) throw nn::CheckpointError("unknown category in checkpoint");
        cats.push_back(*c);
    }
    auto model = std::make_shared<CommentaryModel>(ModelConfig::from_json(ckpt.header.at("config")), *mode, cats);
    nn::restore_parameters(ckpt, model->parameters().items());
    return model;
}

Continuations plan_continuations(const engine::Engine& engine, const chess::Board& board, const chess::Move& move,
                                 Category category, int horizon) {
    if (horizon < 1 || horizon > 16) throw std::invalid_argument("rollout horizon must be in 1..16");
    const auto legal = chess::find_legal(board, move);
    if (!legal) {
        throw CommentaryError(CommentaryError::Kind::illegal_move,
                              "move " + move.uci() + " is not legal in " + board.fen());
    }
    Continuations c{board, *legal, chess::apply_move(board, *legal), std::nullopt, std::nullopt, {}};
    if (category == Category::comparison) {
        c.alternative = engine.select_alternative(board, *legal);
        c.alternative_after = chess::apply_move(board, c.alternative->move);
    }
    if (category == Category::planning || category == Category::contexts) {
        c.rollout = engine.rollout(c.after, horizon);
        if (category == Category::planning && c.rollout.empty()) {
            throw CommentaryError(CommentaryError::Kind::no_continuation,
                                  "no continuation to plan: the game is over after " + legal->uci());
        }
    }
    return c;
}

Context build_context(nn::Graph& g, const CommentaryModel& model, Category category, const Continuations& cont) {
    const auto& shared = model.shared(category);
    const auto& net = *shared.engine;
    const auto mover = cont.before.side_to_move();

    // Win rate of `board` for the player who made m0.
    auto mover_value = [&](const chess::Board& board, nn::Var state) {
        const auto status = chess::game_status(board);
        const nn::Var v = status == chess::GameStatus::ongoing ? net.win_rate(g, state)
                                                               : g.scalar(engine::terminal_value(status));
        return board.side_to_move() == mover ? v : g.add_scalar(g.scale(v, -1.0), 1.0);
    };
    auto choice = [&](const chess::Board& predecessor, const chess::Move& move, const chess::Board& board) {
        const auto rows = shared.move_encoder.encode(g, encoders::move_features(predecessor, move));
        const auto state = net.board_state(g, board);
        const auto value = (*shared.value)(g, state, mover_value(board, state));
        return encoders::make_choice(g, rows, state, value);
    };

    Context ctx;
    ctx.initial_state = net.board_state(g, cont.before);
    switch (category) {
        case Category::description: {
            for (const auto row : shared.move_encoder.encode(g, encoders::move_features(cont.before, cont.move))) {
                ctx.rows.add(row, encoders::RowKind::move_feature);
            }
            ctx.rows.add(ctx.initial_state, encoders::RowKind::board_state);
            break;
        }
        case Category::quality: {
            const auto after = net.board_state(g, cont.after);
            const auto delta = g.sub(mover_value(cont.after, after), mover_value(cont.before, ctx.initial_state));
            ctx.rows.add(ctx.initial_state, encoders::RowKind::board_state);
            ctx.rows.add(after, encoders::RowKind::board_state);
            ctx.rows.add((*model.decoder(category).diff)(g, ctx.initial_state, after, delta),
                         encoders::RowKind::diff_embed);
            break;
        }
        case Category::comparison: {
            if (!cont.alternative || !cont.alternative_after) throw std::invalid_argument("comparison needs m^0");
            ctx.choices.push_back(choice(cont.before, cont.move, cont.after));
            ctx.choices.push_back(choice(cont.before, cont.alternative->move, *cont.alternative_after));
            break;
        }
        case Category::contexts:
            ctx.choices.push_back(choice(cont.before, cont.move, cont.after));
            [[fallthrough]];
        case Category::planning: {
            const chess::Board* predecessor = &cont.after;
            for (const auto& [board, move] : cont.rollout) {
                ctx.choices.push_back(choice(*predecessor, move, board));
                predecessor = &board;
            }
            if (ctx.choices.empty()) {
                throw CommentaryError(CommentaryError::Kind::no_continuation, "no continuation to plan");
            }
            break;
        }
    }
    if (!ctx.rows.rows.empty()) ctx.stacked = g.stack(ctx.rows.rows);
    return ctx;
}

nn::Var attend_context(nn::Graph& g, const CommentaryModel& model, Category category, const Context& context,
                       nn::Var h) {
    const auto& decoder = model.decoder(category);
    if (!context.choices.empty()) return model.shared(category).mce->context(g, context.choices, h, decoder.attention).z;
    return decoder.attention.attend(g, context.stacked, h).z;
}

namespace {

struct Step {
    nn::LstmCell::State state;
    nn::Var logits;
};

Step decode_step(nn::Graph& g, const CommentaryModel& model, Category category, const Context& ctx, nn::Var input,
                 const nn::LstmCell::State& state) {
    const auto& decoder = model.decoder(category);
    const auto next = decoder.lstm.step(g, input, state);
    const nn::Var both[] = {next.h, attend_context(g, model, category, ctx, next.h)};
    return {next, decoder.output(g, g.concat(both))};
}

nn::Var first_input(nn::Graph& g, const Decoder& decoder, const Context& ctx) {
    return g.add(decoder.words(g, Vocabulary::kBos), decoder.start(g, ctx.initial_state));
}

// log softmax with PAD and BOS excluded (they are never generated).
std::vector<double> log_probs(const nn::Tensor& logits) {
    std::vector<double> out(logits.values().begin(), logits.values().end());
    out[Vocabulary::kPad] = -std::numeric_limits<double>::infinity();
    out[Vocabulary::kBos] = -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double v : out) total += std::exp(v - m);
    const double lse = m + std::log(total);
    for (double& v : out) v -= lse;
    return out;
}

std::size_t argmax(const std::vector<double>& xs) {
    return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

}  // namespace

GenerationLoss generation_loss(nn::Graph& g, const CommentaryModel& model, Category category,
                               const Continuations& cont, const std::vector<std::size_t>& tokens) {
    if (tokens.empty() || tokens.back() != Vocabulary::kEos) {
        throw CommentaryError(CommentaryError::Kind::bad_token, "target must end with the end marker");
    }
    for (const auto t : tokens) {
        if (t >= model.config().vocab_size) {
            throw CommentaryError(CommentaryError::Kind::bad_token,
                                  "token id " + std::to_string(t) + " outside the vocabulary");
        }
    }
    const auto& decoder = model.decoder(category);
    const auto ctx = build_context(g, model, category, cont);
    GenerationLoss out;
    std::vector<nn::Var> terms;
    auto state = decoder.lstm.zero_state(g);
    nn::Var input = first_input(g, decoder, ctx);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const auto step = decode_step(g, model, category, ctx, input, state);
        state = step.state;
        out.logits.push_back(step.logits);
        terms.push_back(g.softmax_cross_entropy(step.logits, tokens[t]));
        if (t + 1 < tokens.size()) input = decoder.words(g, tokens[t]);
    }
    out.loss = g.mean(terms);
    return out;
}

void GenerationConfig::validate() const {
    if (beam_width < 1) throw std::invalid_argument("beam width must be at least 1");
    if (max_tokens < 1) throw std::invalid_argument("max tokens must be at least 1");
    if (length_penalty < 0) throw std::invalid_argument("length penalty must be non-negative");
}

std::vector<std::size_t> generate(const CommentaryModel& model, Category category, const Continuations& cont,
                                  const GenerationConfig& config) {
    config.validate();
    const auto& decoder = model.decoder(category);
    nn::Graph g(false);
    const auto ctx = build_context(g, model, category, cont);

    if (config.method == GenerationConfig::Method::greedy) {
        std::vector<std::size_t> out;
        auto state = decoder.lstm.zero_state(g);
        nn::Var input = first_input(g, decoder, ctx);
        while (out.size() < config.max_tokens) {
            const auto step = decode_step(g, model, category, ctx, input, state);
            const auto token = argmax(log_probs(g.value(step.logits)));
            if (token == Vocabulary::kEos) break;
            out.push_back(token);
            state = step.state;
            input = decoder.words(g, token);
        }
        return out;
    }

    struct Hypothesis {
        std::vector<std::size_t> tokens;
        double log_prob = 0.0;
        nn::LstmCell::State state;
        nn::Var input;
    };
    struct Candidate {
        std::size_t parent;
        std::size_t token;
        double log_prob;
    };
    auto normalized = [&](const std::vector<std::size_t>& tokens, bool ended, double log_prob) {
        const double length = static_cast<double>(tokens.size() + (ended ? 1 : 0));
        return log_prob / std::pow((5.0 + length) / 6.0, config.length_penalty);
    };

    std::vector<Hypothesis> active{{{}, 0.0, decoder.lstm.zero_state(g), first_input(g, decoder, ctx)}};
    std::vector<std::pair<double, std::vector<std::size_t>>> finished;
    for (std::size_t len = 0; len < config.max_tokens && !active.empty(); ++len) {
        std::vector<Candidate> candidates;
        std::vector<nn::LstmCell::State> next_states;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const auto step = decode_step(g, model, category, ctx, active[i].input, active[i].state);
            next_states.push_back(step.state);
            const auto lp = log_probs(g.value(step.logits));
            for (std::size_t t = 0; t < lp.size(); ++t) {
                if (std::isfinite(lp[t])) candidates.push_back({i, t, active[i].log_prob + lp[t]});
            }
        }
        const auto keep = std::min(config.beam_width, candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                          [](const Candidate& a, const Candidate& b) {
                              if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                              if (a.parent != b.parent) return a.parent < b.parent;
                              return a.token < b.token;
                          });
        std::vector<Hypothesis> next;
        for (std::size_t k = 0; k < keep; ++k) {
            const auto& c = candidates[k];
            const auto& parent = active[c.parent];
            if (c.token == Vocabulary::kEos) {
                finished.emplace_back(normalized(parent.tokens, true, c.log_prob), parent.tokens);
                continue;
            }
            Hypothesis h{parent.tokens, c.log_prob, next_states[c.parent], decoder.words(g, c.token)};
            h.tokens.push_back(c.token);
            next.push_back(std::move(h));
        }
        active = std::move(next);
        if (finished.size() >= config.beam_width) break;
    }
    for (const auto& h : active) finished.emplace_back(normalized(h.tokens, false, h.log_prob), h.tokens);
    const auto best = std::max_element(finished.begin(), finished.end(),
                                       [](const auto& a, const auto& b) { return a.first < b.first; });
    return best->second;
}

}  // namespace scc::commentary
