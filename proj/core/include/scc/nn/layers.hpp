#pragma once

#include <span>
#include <string>
#include <vector>

#include "scc/nn/graph.hpp"
#include "scc/nn/parameter.hpp"

namespace scc::nn {

/// Affine map y = W x + b.
class Dense {
public:
    Dense(const std::string& name, std::size_t inputs, std::size_t outputs, Rng& rng, bool bias = true);

    Var operator()(Graph& g, Var x) const;
    /// Only the listed output rows (used for the masked policy head).
    Var rows(Graph& g, Var x, std::vector<std::size_t> indices) const;

    std::size_t inputs() const noexcept { return weight->value.dim(1); }
    std::size_t outputs() const noexcept { return weight->value.dim(0); }
    void collect(ParameterList& out) const;
    void zero() const;

    ParameterPtr weight;
    ParameterPtr bias;  // null when constructed without bias
};

/// 3x3, stride 1, zero-padded convolution.
class Conv2d {
public:
    Conv2d(const std::string& name, std::size_t in_channels, std::size_t out_channels, Rng& rng);

    Var operator()(Graph& g, Var x) const;
    void collect(ParameterList& out) const;

    ParameterPtr weight;
    ParameterPtr bias;
};

/// Lookup table of learned rows.
class Embedding {
public:
    Embedding(const std::string& name, std::size_t count, std::size_t width, Rng& rng);

    Var operator()(Graph& g, std::size_t id) const;
    std::size_t count() const noexcept { return table->value.dim(0); }
    std::size_t width() const noexcept { return table->value.dim(1); }
    void collect(ParameterList& out) const;

    ParameterPtr table;
};

/// LSTM cell with fused gate weights over [x; h], gate order (input, forget,
/// cell, output). The forget-gate bias starts at +1.
class LstmCell {
public:
    struct State {
        Var h;
        Var c;
    };

    LstmCell(const std::string& name, std::size_t inputs, std::size_t hidden, Rng& rng);

    State zero_state(Graph& g) const;
    State step(Graph& g, Var x, const State& state) const;

    std::size_t inputs() const noexcept { return inputs_; }
    std::size_t hidden() const noexcept { return hidden_; }
    void collect(ParameterList& out) const;

    ParameterPtr weight;  // [4H, I+H]
    ParameterPtr bias;    // [4H]

private:
    std::size_t inputs_;
    std::size_t hidden_;
};

/// Bidirectional LSTM; each position's [forward; backward] state is projected
/// to `outputs` by a dense layer.
class BiRnn {
public:
    BiRnn(const std::string& name, std::size_t inputs, std::size_t hidden, std::size_t outputs, Rng& rng);

    std::vector<Var> encode(Graph& g, std::span<const Var> sequence) const;
    void collect(ParameterList& out) const;

    LstmCell forward;
    LstmCell backward;
    Dense projection;
};

}  // namespace scc::nn
