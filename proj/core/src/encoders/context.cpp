#include "scc/encoders/context.hpp"

namespace scc::encoders {

std::string_view to_string(RowKind kind) noexcept {
    switch (kind) {
        case RowKind::move_feature: return "move-feature";
        case RowKind::board_state: return "board-state";
        case RowKind::value_embed: return "value-embed";
        case RowKind::diff_embed: return "diff-embed";
    }
    return "?";
}

Attention::Attention(const std::string& name, std::size_t row_width, std::size_t query_width, nn::Rng& rng)
    : weight(nn::make_parameter(name + "/W", {row_width, query_width})) {
    nn::init_xavier_uniform(*weight, query_width, row_width, rng);
}

nn::Var Attention::scores(nn::Graph& g, nn::Var rows, nn::Var query) const {
    return g.matvec(rows, g.matvec(g.param(weight), query));
}

Attention::Result Attention::attend(nn::Graph& g, nn::Var rows, nn::Var query) const {
    const auto a = g.softmax(scores(g, rows, query));
    return {g.matvec_transposed(rows, a), a};
}

Attention::Result Attention::attend(nn::Graph& g, const ContextRows& context, nn::Var query) const {
    if (context.rows.empty()) throw std::invalid_argument("attention over an empty context");
    return attend(g, g.stack(context.rows), query);
}

void Attention::collect(nn::ParameterList& out) const { out.add(weight); }

ValueEmbedding::ValueEmbedding(const std::string& name, std::size_t width, nn::Rng& rng)
    : weight(nn::make_parameter(name, {width, width + 1})) {
    nn::init_xavier_uniform(*weight, width + 1, width, rng);
}

nn::Var ValueEmbedding::operator()(nn::Graph& g, nn::Var board_state, nn::Var win_rate) const {
    const nn::Var parts[] = {board_state, win_rate};
    return g.matvec(g.param(weight), g.concat(parts));
}

DiffEmbedding::DiffEmbedding(const std::string& name, std::size_t width, nn::Rng& rng)
    : weight(nn::make_parameter(name, {width, 2 * width + 1})) {
    nn::init_xavier_uniform(*weight, 2 * width + 1, width, rng);
}

nn::Var DiffEmbedding::operator()(nn::Graph& g, nn::Var state_before, nn::Var state_after, nn::Var delta_v) const {
    const nn::Var parts[] = {state_before, state_after, delta_v};
    return g.matvec(g.param(weight), g.concat(parts));
}

Choice make_choice(nn::Graph& g, const std::vector<nn::Var>& move_rows, nn::Var board_state, nn::Var value_embed) {
    std::vector<nn::Var> rows(move_rows);
    rows.push_back(board_state);
    rows.push_back(value_embed);
    return {g.stack(rows), board_state};
}

MultiChoiceEncoder::MultiChoiceEncoder(const std::string& name, std::size_t width, nn::Rng& rng)
    : experience(nn::make_parameter(name + "/g", {width})) {
    nn::init_xavier_uniform(*experience, width, 1, rng);
}

nn::Var MultiChoiceEncoder::choice_weights(nn::Graph& g, const std::vector<nn::Var>& states) const {
    if (states.empty()) throw std::invalid_argument("choice weights need at least one choice");
    const auto gv = g.param(experience);
    std::vector<nn::Var> scores;
    scores.reserve(states.size());
    for (const auto& s : states) scores.push_back(g.dot(gv, s));
    return g.softmax(g.concat(scores));
}

MultiChoiceEncoder::Result MultiChoiceEncoder::context(nn::Graph& g, const std::vector<Choice>& choices,
                                                       nn::Var query, const Attention& attention) const {
    std::vector<nn::Var> states;
    states.reserve(choices.size());
    for (const auto& c : choices) states.push_back(c.board_state);
    Result out;
    out.choice_weights = choice_weights(g, states);
    std::vector<nn::Var> parts;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        const auto inner = g.softmax(attention.scores(g, choices[i].rows, query));
        const auto a = g.scale_by(g.slice(out.choice_weights, i, 1), inner);
        out.attention.push_back(a);
        parts.push_back(g.matvec_transposed(choices[i].rows, a));
    }
    out.z = parts.size() == 1 ? parts.front() : g.add_n(parts);
    return out;
}

}  // namespace scc::encoders
