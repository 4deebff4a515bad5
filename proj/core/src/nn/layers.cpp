#include "scc/nn/layers.hpp"

namespace scc::nn {

Dense::Dense(const std::string& name, std::size_t inputs, std::size_t outputs, Rng& rng, bool with_bias)
    : weight(make_parameter(name + "/weight", {outputs, inputs})) {
    init_xavier_uniform(*weight, inputs, outputs, rng);
    if (with_bias) bias = make_parameter(name + "/bias", {outputs});
}

Var Dense::operator()(Graph& g, Var x) const {
    const Var wx = g.matvec(g.param(weight), x);
    return bias ? g.add(wx, g.param(bias)) : wx;
}

Var Dense::rows(Graph& g, Var x, std::vector<std::size_t> indices) const {
    if (!bias) throw std::logic_error("Dense::rows requires a bias");
    return g.affine_rows(g.param(weight), x, g.param(bias), std::move(indices));
}

void Dense::collect(ParameterList& out) const {
    out.add(weight);
    if (bias) out.add(bias);
}

void Dense::zero() const {
    weight->value.fill(0.0);
    if (bias) bias->value.fill(0.0);
}

Conv2d::Conv2d(const std::string& name, std::size_t in_channels, std::size_t out_channels, Rng& rng)
    : weight(make_parameter(name + "/weight", {out_channels, in_channels, 3, 3})),
      bias(make_parameter(name + "/bias", {out_channels})) {
    init_xavier_uniform(*weight, in_channels * 9, out_channels * 9, rng);
}

Var Conv2d::operator()(Graph& g, Var x) const { return g.conv2d(x, g.param(weight), g.param(bias)); }

void Conv2d::collect(ParameterList& out) const {
    out.add(weight);
    out.add(bias);
}

Embedding::Embedding(const std::string& name, std::size_t count, std::size_t width, Rng& rng)
    : table(make_parameter(name + "/table", {count, width})) {
    init_xavier_uniform(*table, count, width, rng);
}

Var Embedding::operator()(Graph& g, std::size_t id) const {
    if (id >= count()) {
        throw std::out_of_range(table->name + ": id " + std::to_string(id) + " outside " + std::to_string(count()));
    }
    return g.row(g.param(table), id);
}

void Embedding::collect(ParameterList& out) const { out.add(table); }

LstmCell::LstmCell(const std::string& name, std::size_t inputs, std::size_t hidden, Rng& rng)
    : weight(make_parameter(name + "/weight", {4 * hidden, inputs + hidden})),
      bias(make_parameter(name + "/bias", {4 * hidden})),
      inputs_(inputs),
      hidden_(hidden) {
    init_xavier_uniform(*weight, inputs + hidden, 4 * hidden, rng);
    for (std::size_t i = hidden; i < 2 * hidden; ++i) bias->value[i] = 1.0;
}

LstmCell::State LstmCell::zero_state(Graph& g) const {
    return {g.constant(Tensor({hidden_})), g.constant(Tensor({hidden_}))};
}

LstmCell::State LstmCell::step(Graph& g, Var x, const State& state) const {
    if (g.value(x).size() != inputs_) {
        throw ShapeError(weight->name + ": expected input [" + std::to_string(inputs_) + "], got " +
                         shape_string(g.value(x).shape()));
    }
    if (g.value(state.h).size() != hidden_ || g.value(state.c).size() != hidden_) {
        throw ShapeError(weight->name + ": state width must be " + std::to_string(hidden_));
    }
    const Var parts[] = {x, state.h};
    const Var gates = g.affine(g.param(weight), g.concat(parts), g.param(bias));
    const Var in = g.sigmoid(g.slice(gates, 0, hidden_));
    const Var forget = g.sigmoid(g.slice(gates, hidden_, hidden_));
    const Var cell = g.tanh(g.slice(gates, 2 * hidden_, hidden_));
    const Var out = g.sigmoid(g.slice(gates, 3 * hidden_, hidden_));
    const Var c = g.add(g.mul(forget, state.c), g.mul(in, cell));
    const Var h = g.mul(out, g.tanh(c));
    return {h, c};
}

void LstmCell::collect(ParameterList& out) const {
    out.add(weight);
    out.add(bias);
}

BiRnn::BiRnn(const std::string& name, std::size_t inputs, std::size_t hidden, std::size_t outputs, Rng& rng)
    : forward(name + "/forward", inputs, hidden, rng),
      backward(name + "/backward", inputs, hidden, rng),
      projection(name + "/projection", 2 * hidden, outputs, rng) {}

std::vector<Var> BiRnn::encode(Graph& g, std::span<const Var> sequence) const {
    if (sequence.empty()) throw std::invalid_argument("BiRnn::encode: empty sequence");
    const auto n = sequence.size();
    std::vector<Var> fwd(n);
    std::vector<Var> bwd(n);
    auto state = forward.zero_state(g);
    for (std::size_t i = 0; i < n; ++i) {
        state = forward.step(g, sequence[i], state);
        fwd[i] = state.h;
    }
    state = backward.zero_state(g);
    for (std::size_t i = n; i-- > 0;) {
        state = backward.step(g, sequence[i], state);
        bwd[i] = state.h;
    }
    std::vector<Var> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Var both[] = {fwd[i], bwd[i]};
        out[i] = projection(g, g.concat(both));
    }
    return out;
}

void BiRnn::collect(ParameterList& out) const {
    forward.collect(out);
    backward.collect(out);
    projection.collect(out);
}

}  // namespace scc::nn
