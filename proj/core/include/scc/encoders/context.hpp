#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scc/nn/graph.hpp"
#include "scc/nn/layers.hpp"

namespace scc::encoders {

enum class RowKind { move_feature, board_state, value_embed, diff_embed };

std::string_view to_string(RowKind kind) noexcept;

/// Attention memory E: n rows of width d with a provenance label per row.
struct ContextRows {
    std::vector<nn::Var> rows;
    std::vector<RowKind> labels;

    void add(nn::Var row, RowKind kind) {
        rows.push_back(row);
        labels.push_back(kind);
    }
    std::size_t size() const noexcept { return rows.size(); }
};

/// Bilinear attention f(X, y) = X W y, a = softmax(f(E, h)), z = E^T a.
class Attention {
public:
    struct Result {
        nn::Var z;
        nn::Var weights;  // a
    };

    Attention(const std::string& name, std::size_t row_width, std::size_t query_width, nn::Rng& rng);

    /// Scores f(E, h) for rows stacked as [n, d].
    nn::Var scores(nn::Graph& g, nn::Var rows, nn::Var query) const;
    Result attend(nn::Graph& g, nn::Var rows, nn::Var query) const;
    Result attend(nn::Graph& g, const ContextRows& context, nn::Var query) const;
    void collect(nn::ParameterList& out) const;

    nn::ParameterPtr weight;  // W, [d, query width]
};

/// E_V = W_val [E_S; v] (no bias).
class ValueEmbedding {
public:
    ValueEmbedding(const std::string& name, std::size_t width, nn::Rng& rng);
    nn::Var operator()(nn::Graph& g, nn::Var board_state, nn::Var win_rate) const;
    void collect(nn::ParameterList& out) const { out.add(weight); }

    nn::ParameterPtr weight;  // [d, d + 1]
};

/// E_D = W_diff [E_S0; E_S1; v1 - v0] (no bias).
class DiffEmbedding {
public:
    DiffEmbedding(const std::string& name, std::size_t width, nn::Rng& rng);
    nn::Var operator()(nn::Graph& g, nn::Var state_before, nn::Var state_after, nn::Var delta_v) const;
    void collect(nn::ParameterList& out) const { out.add(weight); }

    nn::ParameterPtr weight;  // [d, 2d + 1]
};

/// One candidate continuation: its 6 move rows, E_S and E_V stacked as [8, d].
struct Choice {
    nn::Var rows;
    nn::Var board_state;
};

Choice make_choice(nn::Graph& g, const std::vector<nn::Var>& move_rows, nn::Var board_state, nn::Var value_embed);

/// The experience vector g together with the choice weighting and
/// choice-scaled attention.
class MultiChoiceEncoder {
public:
    struct Result {
        nn::Var z;
        nn::Var choice_weights;             // c
        std::vector<nn::Var> attention;     // A_i per choice
    };

    MultiChoiceEncoder(const std::string& name, std::size_t width, nn::Rng& rng);

    /// c = softmax(g . E_S^i).
    nn::Var choice_weights(nn::Graph& g, const std::vector<nn::Var>& states) const;
    /// A_i = c_i softmax(f(rows_i, h)); z = sum_i rows_i^T A_i.
    Result context(nn::Graph& g, const std::vector<Choice>& choices, nn::Var query, const Attention& attention) const;
    void collect(nn::ParameterList& out) const { out.add(experience); }

    nn::ParameterPtr experience;  // g, [d]
};

}  // namespace scc::encoders
