#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "scc/nn/parameter.hpp"
#include "scc/nn/tensor.hpp"

namespace scc::nn {

/// Handle to a node of a Graph.
struct Var {
    std::uint32_t id = std::numeric_limits<std::uint32_t>::max();
    bool valid() const noexcept { return id != std::numeric_limits<std::uint32_t>::max(); }
};

/// Reverse-mode tape. Every op computes its value eagerly and, when recording,
/// registers an explicit backward rule. A graph is built per example and
/// discarded; parameters are shared across graphs and read-only during the
/// forward pass, so independent graphs may run on different threads as long
/// as none of them calls backward().
class Graph {
public:
    explicit Graph(bool record = true) : record_(record) {}

    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    bool recording() const noexcept { return record_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    Var constant(Tensor value);
    Var scalar(double value) { return constant(Tensor({1}, value)); }
    /// Leaf bound to a parameter; one leaf per parameter per graph.
    Var param(const ParameterPtr& p);

    const Tensor& value(Var v) const {
        const auto& n = nodes_.at(v.id);
        return n.external ? *n.external : n.value;
    }
    double scalar_value(Var v) const;
    /// Gradient of the last backward() target w.r.t. `v` (zeros if unreached).
    /// For parameter leaves this is the parameter's accumulated gradient.
    Tensor grad(Var v) const;

    /// Seeds d(loss)/d(loss) = 1 and accumulates into Parameter::grad of every
    /// trainable parameter reached.
    void backward(Var loss);

    // Elementwise (identical shapes).
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double k);
    Var add_scalar(Var a, double k);
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var silu(Var a);
    Var square(Var a);
    Var add_n(std::span<const Var> xs);

    /// Sum of all entries, shape [1].
    Var sum(Var a);
    /// Arithmetic mean of scalar ([1]) nodes.
    Var mean(std::span<const Var> scalars);

    /// W[m,n] x[n] -> [m]
    Var matvec(Var w, Var x);
    /// W x + b
    Var affine(Var w, Var x, Var b);
    /// (W x + b) restricted to `rows`, shape [rows.size()].
    Var affine_rows(Var w, Var x, Var b, std::vector<std::size_t> rows);
    /// M[n,d]^T a[n] -> [d]
    Var matvec_transposed(Var m, Var a);
    /// 3x3 cross-correlation, stride 1, zero padding 1: x[C,H,W], w[O,C,3,3], b[O] -> [O,H,W].
    Var conv2d(Var x, Var w, Var b);

    Var reshape(Var a, Shape shape);
    /// Flattened concatenation.
    Var concat(std::span<const Var> parts);
    /// Stack equal-length vectors into rows: n x [d] -> [n,d].
    Var stack(std::span<const Var> rows);
    Var slice(Var a, std::size_t offset, std::size_t length);
    /// Row `index` of a rank-2 node.
    Var row(Var m, std::size_t index);

    Var softmax(Var a);
    Var dot(Var a, Var b);
    /// s[1] * v
    Var scale_by(Var s, Var v);
    /// -log softmax(logits)[target], shape [1].
    Var softmax_cross_entropy(Var logits, std::size_t target);

private:
    struct Node {
        Tensor value;
        // Parameter leaves alias the parameter's storage instead of copying it.
        const Tensor* external = nullptr;
        // Gradients for parameter leaves accumulate directly into the parameter.
        Parameter* param = nullptr;
        Tensor grad;
        std::function<void()> backward;
        bool needs_grad = false;
    };

    Var push(Tensor value, bool needs_grad);
    bool needs(Var v) const { return nodes_[v.id].needs_grad; }
    bool any_needs(std::span<const Var> vs) const;
    Tensor& grad_ref(Var v);
    const Node& node(Var v) const { return nodes_.at(v.id); }
    void check_same_shape(Var a, Var b, const char* op) const;

    bool record_;
    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, Var> param_leaves_;
};

}  // namespace scc::nn
