#include "scc/nn/graph.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace scc::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstMatMap as_matrix(const Tensor& t) {
    return ConstMatMap(t.data(), static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1)));
}
MatMap as_matrix(Tensor& t) {
    return MatMap(t.data(), static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1)));
}
ConstVecMap as_vector(const Tensor& t) { return ConstVecMap(t.data(), static_cast<Eigen::Index>(t.size())); }
VecMap as_vector(Tensor& t) { return VecMap(t.data(), static_cast<Eigen::Index>(t.size())); }

double sigmoid_of(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got shape " +
                         shape_string(t.shape()));
    }
}

// im2col for a 3x3 kernel with padding 1: cols[C*9, H*W].
void im2col(const Tensor& x, RowMatrix& cols) {
    const auto c_in = static_cast<int>(x.dim(0));
    const auto h = static_cast<int>(x.dim(1));
    const auto w = static_cast<int>(x.dim(2));
    cols.setZero(c_in * 9, h * w);
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                const int row = (c * 3 + ky) * 3 + kx;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    for (int xx = 0; xx < w; ++xx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= w) continue;
                        cols(row, y * w + xx) = x[(c * h + sy) * w + sx];
                    }
                }
            }
        }
    }
}

void col2im_add(const RowMatrix& cols, Tensor& dx) {
    const auto c_in = static_cast<int>(dx.dim(0));
    const auto h = static_cast<int>(dx.dim(1));
    const auto w = static_cast<int>(dx.dim(2));
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                const int row = (c * 3 + ky) * 3 + kx;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    for (int xx = 0; xx < w; ++xx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= w) continue;
                        dx[(c * h + sy) * w + sx] += cols(row, y * w + xx);
                    }
                }
            }
        }
    }
}

}  // namespace

Var Graph::push(Tensor value, bool needs_grad) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = record_ && needs_grad;
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

bool Graph::any_needs(std::span<const Var> vs) const {
    return std::any_of(vs.begin(), vs.end(), [this](Var v) { return needs(v); });
}

Tensor& Graph::grad_ref(Var v) {
    auto& n = nodes_[v.id];
    if (n.param) return n.param->grad;
    const auto& val = value(v);
    if (n.grad.size() != val.size()) n.grad = Tensor(val.shape());
    return n.grad;
}

void Graph::check_same_shape(Var a, Var b, const char* op) const {
    if (value(a).shape() != value(b).shape()) {
        throw ShapeError(std::string(op) + ": operand shapes differ, " + shape_string(value(a).shape()) + " vs " +
                         shape_string(value(b).shape()));
    }
}

Var Graph::constant(Tensor value) { return push(std::move(value), false); }

Var Graph::param(const ParameterPtr& p) {
    if (auto it = param_leaves_.find(p.get()); it != param_leaves_.end()) return it->second;
    const Var v = push(Tensor(), p->trainable);
    nodes_[v.id].external = &p->value;
    nodes_[v.id].param = p.get();
    param_leaves_.emplace(p.get(), v);
    return v;
}

double Graph::scalar_value(Var v) const {
    const auto& t = value(v);
    if (t.size() != 1) throw ShapeError("scalar_value: node has shape " + shape_string(t.shape()));
    return t[0];
}

Tensor Graph::grad(Var v) const {
    const auto& n = node(v);
    if (n.param) return n.param->grad;
    if (n.grad.size() == value(v).size()) return n.grad;
    return Tensor(value(v).shape());
}

void Graph::backward(Var loss) {
    if (!record_) throw std::logic_error("backward() on a non-recording graph");
    if (value(loss).size() != 1) throw ShapeError("backward: loss must be a scalar, got " + shape_string(value(loss).shape()));
    if (!needs(loss)) return;
    grad_ref(loss)[0] = 1.0;
    for (std::uint32_t id = loss.id + 1; id-- > 0;) {
        auto& n = nodes_[id];
        if (!n.needs_grad || !n.backward || n.grad.size() != value(Var{id}).size()) continue;
        n.backward();
    }
}

Var Graph::add(Var a, Var b) {
    check_same_shape(a, b, "add");
    Tensor out = value(a);
    as_vector(out) += as_vector(value(b));
    const Var y = push(std::move(out), needs(a) || needs(b));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, b, y] {
            const auto& g = nodes_[y.id].grad;
            if (needs(a)) as_vector(grad_ref(a)) += as_vector(g);
            if (needs(b)) as_vector(grad_ref(b)) += as_vector(g);
        };
    }
    return y;
}

Var Graph::sub(Var a, Var b) {
    check_same_shape(a, b, "sub");
    Tensor out = value(a);
    as_vector(out) -= as_vector(value(b));
    const Var y = push(std::move(out), needs(a) || needs(b));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, b, y] {
            const auto& g = nodes_[y.id].grad;
            if (needs(a)) as_vector(grad_ref(a)) += as_vector(g);
            if (needs(b)) as_vector(grad_ref(b)) -= as_vector(g);
        };
    }
    return y;
}

Var Graph::mul(Var a, Var b) {
    check_same_shape(a, b, "mul");
    Tensor out = value(a);
    as_vector(out).array() *= as_vector(value(b)).array();
    const Var y = push(std::move(out), needs(a) || needs(b));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, b, y] {
            const auto g = as_vector(nodes_[y.id].grad).array();
            if (needs(a)) as_vector(grad_ref(a)).array() += g * as_vector(value(b)).array();
            if (needs(b)) as_vector(grad_ref(b)).array() += g * as_vector(value(a)).array();
        };
    }
    return y;
}

Var Graph::scale(Var a, double k) {
    Tensor out = value(a);
    as_vector(out) *= k;
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y, k] { as_vector(grad_ref(a)) += k * as_vector(nodes_[y.id].grad); };
    }
    return y;
}

Var Graph::add_scalar(Var a, double k) {
    Tensor out = value(a);
    as_vector(out).array() += k;
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] { as_vector(grad_ref(a)) += as_vector(nodes_[y.id].grad); };
    }
    return y;
}

Var Graph::tanh(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) v = std::tanh(v);
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] {
            const auto yv = as_vector(value(y)).array();
            as_vector(grad_ref(a)).array() += as_vector(nodes_[y.id].grad).array() * (1.0 - yv * yv);
        };
    }
    return y;
}

Var Graph::sigmoid(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) v = sigmoid_of(v);
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] {
            const auto yv = as_vector(value(y)).array();
            as_vector(grad_ref(a)).array() += as_vector(nodes_[y.id].grad).array() * yv * (1.0 - yv);
        };
    }
    return y;
}

Var Graph::silu(Var a) {
    Tensor out = value(a);
    for (auto& v : out.values()) v = v * sigmoid_of(v);
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] {
            const auto& x = value(a);
            const auto& g = nodes_[y.id].grad;
            auto& ga = grad_ref(a);
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double s = sigmoid_of(x[i]);
                ga[i] += g[i] * s * (1.0 + x[i] * (1.0 - s));
            }
        };
    }
    return y;
}

Var Graph::square(Var a) {
    Tensor out = value(a);
    as_vector(out).array() = as_vector(out).array().square();
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] {
            as_vector(grad_ref(a)).array() += 2.0 * as_vector(value(a)).array() * as_vector(nodes_[y.id].grad).array();
        };
    }
    return y;
}

Var Graph::add_n(std::span<const Var> xs) {
    if (xs.empty()) throw ShapeError("add_n: no operands");
    Tensor out = value(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        check_same_shape(xs[0], xs[i], "add_n");
        as_vector(out) += as_vector(value(xs[i]));
    }
    const Var y = push(std::move(out), any_needs(xs));
    if (needs(y)) {
        nodes_[y.id].backward = [this, inputs = std::vector<Var>(xs.begin(), xs.end()), y] {
            for (Var x : inputs) {
                if (needs(x)) as_vector(grad_ref(x)) += as_vector(nodes_[y.id].grad);
            }
        };
    }
    return y;
}

Var Graph::sum(Var a) {
    const Var y = push(Tensor({1}, as_vector(value(a)).sum()), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] { as_vector(grad_ref(a)).array() += nodes_[y.id].grad[0]; };
    }
    return y;
}

Var Graph::mean(std::span<const Var> scalars) {
    return scale(add_n(scalars), 1.0 / static_cast<double>(scalars.size()));
}

Var Graph::matvec(Var w, Var x) {
    const auto& W = value(w);
    const auto& X = value(x);
    require_rank(W, 2, "matvec weight");
    if (X.size() != W.dim(1)) {
        throw ShapeError("matvec: expected input [" + std::to_string(W.dim(1)) + "], got " + shape_string(X.shape()));
    }
    Tensor out({W.dim(0)});
    as_vector(out).noalias() = as_matrix(W) * as_vector(X);
    const Var y = push(std::move(out), needs(w) || needs(x));
    if (needs(y)) {
        nodes_[y.id].backward = [this, w, x, y] {
            const auto g = as_vector(nodes_[y.id].grad);
            if (needs(w)) as_matrix(grad_ref(w)).noalias() += g * as_vector(value(x)).transpose();
            if (needs(x)) as_vector(grad_ref(x)).noalias() += as_matrix(value(w)).transpose() * g;
        };
    }
    return y;
}

Var Graph::affine(Var w, Var x, Var b) {
    const Var wx = matvec(w, x);
    return add(wx, b);
}

Var Graph::affine_rows(Var w, Var x, Var b, std::vector<std::size_t> rows) {
    const auto& W = value(w);
    const auto& X = value(x);
    const auto& B = value(b);
    require_rank(W, 2, "affine_rows weight");
    if (X.size() != W.dim(1) || B.size() != W.dim(0)) {
        throw ShapeError("affine_rows: weight " + shape_string(W.shape()) + " incompatible with input " +
                         shape_string(X.shape()) + " / bias " + shape_string(B.shape()));
    }
    if (rows.empty()) throw ShapeError("affine_rows: empty row set");
    const auto Wm = as_matrix(W);
    const auto Xv = as_vector(X);
    Tensor out({rows.size()});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] >= W.dim(0)) throw ShapeError("affine_rows: row index out of range");
        out[k] = Wm.row(static_cast<Eigen::Index>(rows[k])).dot(Xv) + B[rows[k]];
    }
    const Var y = push(std::move(out), needs(w) || needs(x) || needs(b));
    if (needs(y)) {
        nodes_[y.id].backward = [this, w, x, b, y, rows = std::move(rows)] {
            const auto& g = nodes_[y.id].grad;
            const auto Xv = as_vector(value(x));
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const auto r = static_cast<Eigen::Index>(rows[k]);
                if (needs(w)) as_matrix(grad_ref(w)).row(r) += g[k] * Xv.transpose();
                if (needs(x)) as_vector(grad_ref(x)) += g[k] * as_matrix(value(w)).row(r).transpose();
                if (needs(b)) grad_ref(b)[rows[k]] += g[k];
            }
        };
    }
    return y;
}

Var Graph::matvec_transposed(Var m, Var a) {
    const auto& M = value(m);
    const auto& A = value(a);
    require_rank(M, 2, "matvec_transposed matrix");
    if (A.size() != M.dim(0)) {
        throw ShapeError("matvec_transposed: expected weights [" + std::to_string(M.dim(0)) + "], got " +
                         shape_string(A.shape()));
    }
    Tensor out({M.dim(1)});
    as_vector(out).noalias() = as_matrix(M).transpose() * as_vector(A);
    const Var y = push(std::move(out), needs(m) || needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, m, a, y] {
            const auto g = as_vector(nodes_[y.id].grad);
            if (needs(m)) as_matrix(grad_ref(m)).noalias() += as_vector(value(a)) * g.transpose();
            if (needs(a)) as_vector(grad_ref(a)).noalias() += as_matrix(value(m)) * g;
        };
    }
    return y;
}

Var Graph::conv2d(Var x, Var w, Var b) {
    const auto& X = value(x);
    const auto& W = value(w);
    const auto& B = value(b);
    require_rank(X, 3, "conv2d input");
    require_rank(W, 4, "conv2d weight");
    const auto c_out = W.dim(0);
    const auto c_in = X.dim(0);
    if (W.shape() != Shape{c_out, c_in, 3, 3}) {
        throw ShapeError("conv2d weight: expected " + shape_string({c_out, c_in, 3, 3}) + ", got " + shape_string(W.shape()));
    }
    require_shape(B, {c_out}, "conv2d bias");
    const auto h = X.dim(1);
    const auto wd = X.dim(2);

    RowMatrix cols;
    im2col(X, cols);
    const ConstMatMap Wm(W.data(), static_cast<Eigen::Index>(c_out), static_cast<Eigen::Index>(c_in * 9));
    Tensor out({c_out, h, wd});
    MatMap Om(out.data(), static_cast<Eigen::Index>(c_out), static_cast<Eigen::Index>(h * wd));
    Om.noalias() = Wm * cols;
    Om.colwise() += as_vector(B);

    const Var y = push(std::move(out), needs(x) || needs(w) || needs(b));
    if (needs(y)) {
        nodes_[y.id].backward = [this, x, w, b, y, cols = std::move(cols), c_out, c_in, h, wd] {
            const auto& G = nodes_[y.id].grad;
            const ConstMatMap Gm(G.data(), static_cast<Eigen::Index>(c_out), static_cast<Eigen::Index>(h * wd));
            if (needs(w)) {
                MatMap dW(grad_ref(w).data(), static_cast<Eigen::Index>(c_out), static_cast<Eigen::Index>(c_in * 9));
                dW.noalias() += Gm * cols.transpose();
            }
            if (needs(b)) as_vector(grad_ref(b)) += Gm.rowwise().sum();
            if (needs(x)) {
                const ConstMatMap Wm(value(w).data(), static_cast<Eigen::Index>(c_out), static_cast<Eigen::Index>(c_in * 9));
                const RowMatrix dcols = Wm.transpose() * Gm;
                col2im_add(dcols, grad_ref(x));
            }
        };
    }
    return y;
}

Var Graph::reshape(Var a, Shape shape) {
    const Var y = push(value(a).reshaped(std::move(shape)), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] { as_vector(grad_ref(a)) += as_vector(nodes_[y.id].grad); };
    }
    return y;
}

Var Graph::concat(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat: no operands");
    std::size_t total = 0;
    for (Var p : parts) total += value(p).size();
    Tensor out({total});
    std::size_t offset = 0;
    for (Var p : parts) {
        const auto& v = value(p);
        std::copy(v.values().begin(), v.values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(offset));
        offset += v.size();
    }
    const Var y = push(std::move(out), any_needs(parts));
    if (needs(y)) {
        nodes_[y.id].backward = [this, inputs = std::vector<Var>(parts.begin(), parts.end()), y] {
            const auto& g = nodes_[y.id].grad;
            std::size_t off = 0;
            for (Var p : inputs) {
                const auto n = value(p).size();
                if (needs(p)) {
                    auto& gp = grad_ref(p);
                    for (std::size_t i = 0; i < n; ++i) gp[i] += g[off + i];
                }
                off += n;
            }
        };
    }
    return y;
}

Var Graph::stack(std::span<const Var> rows) {
    if (rows.empty()) throw ShapeError("stack: no rows");
    const auto d = value(rows[0]).size();
    for (Var r : rows) {
        if (value(r).size() != d) {
            throw ShapeError("stack: expected rows of width " + std::to_string(d) + ", got " + shape_string(value(r).shape()));
        }
    }
    Var flat = concat(rows);
    return reshape(flat, {rows.size(), d});
}

Var Graph::slice(Var a, std::size_t offset, std::size_t length) {
    const auto& v = value(a);
    if (offset + length > v.size() || length == 0) {
        throw ShapeError("slice: range [" + std::to_string(offset) + "," + std::to_string(offset + length) +
                         ") outside " + shape_string(v.shape()));
    }
    Tensor out({length});
    std::copy_n(v.values().begin() + static_cast<std::ptrdiff_t>(offset), length, out.values().begin());
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y, offset, length] {
            const auto& g = nodes_[y.id].grad;
            auto& ga = grad_ref(a);
            for (std::size_t i = 0; i < length; ++i) ga[offset + i] += g[i];
        };
    }
    return y;
}

Var Graph::row(Var m, std::size_t index) {
    const auto& M = value(m);
    require_rank(M, 2, "row");
    if (index >= M.dim(0)) {
        throw ShapeError("row: index " + std::to_string(index) + " outside " + shape_string(M.shape()));
    }
    const auto d = M.dim(1);
    Tensor out({d});
    std::copy_n(M.values().begin() + static_cast<std::ptrdiff_t>(index * d), d, out.values().begin());
    const Var y = push(std::move(out), needs(m));
    if (needs(y)) {
        nodes_[y.id].backward = [this, m, y, index, d] {
            const auto& g = nodes_[y.id].grad;
            auto& gm = grad_ref(m);
            for (std::size_t i = 0; i < d; ++i) gm[index * d + i] += g[i];
        };
    }
    return y;
}

Var Graph::softmax(Var a) {
    Tensor out = value(a);
    auto v = as_vector(out);
    v.array() -= v.maxCoeff();
    v = v.array().exp().matrix();
    v /= v.sum();
    const Var y = push(std::move(out), needs(a));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, y] {
            const auto p = as_vector(value(y));
            const auto g = as_vector(nodes_[y.id].grad);
            const double gp = g.dot(p);
            as_vector(grad_ref(a)).array() += p.array() * (g.array() - gp);
        };
    }
    return y;
}

Var Graph::dot(Var a, Var b) {
    check_same_shape(a, b, "dot");
    const Var y = push(Tensor({1}, as_vector(value(a)).dot(as_vector(value(b)))), needs(a) || needs(b));
    if (needs(y)) {
        nodes_[y.id].backward = [this, a, b, y] {
            const double g = nodes_[y.id].grad[0];
            if (needs(a)) as_vector(grad_ref(a)) += g * as_vector(value(b));
            if (needs(b)) as_vector(grad_ref(b)) += g * as_vector(value(a));
        };
    }
    return y;
}

Var Graph::scale_by(Var s, Var v) {
    if (value(s).size() != 1) throw ShapeError("scale_by: scale must have shape [1], got " + shape_string(value(s).shape()));
    Tensor out = value(v);
    as_vector(out) *= value(s)[0];
    const Var y = push(std::move(out), needs(s) || needs(v));
    if (needs(y)) {
        nodes_[y.id].backward = [this, s, v, y] {
            const auto g = as_vector(nodes_[y.id].grad);
            if (needs(s)) grad_ref(s)[0] += g.dot(as_vector(value(v)));
            if (needs(v)) as_vector(grad_ref(v)) += value(s)[0] * g;
        };
    }
    return y;
}

Var Graph::softmax_cross_entropy(Var logits, std::size_t target) {
    const auto& L = value(logits);
    if (target >= L.size()) {
        throw std::out_of_range("softmax_cross_entropy: target " + std::to_string(target) + " outside " +
                                std::to_string(L.size()) + " classes");
    }
    const auto lv = as_vector(L);
    const double mx = lv.maxCoeff();
    const double log_z = mx + std::log((lv.array() - mx).exp().sum());
    const Var y = push(Tensor({1}, log_z - L[target]), needs(logits));
    if (needs(y)) {
        nodes_[y.id].backward = [this, logits, y, target, log_z] {
            const double g = nodes_[y.id].grad[0];
            auto gl = as_vector(grad_ref(logits));
            gl.array() += g * (as_vector(value(logits)).array() - log_z).exp();
            gl[static_cast<Eigen::Index>(target)] -= g;
        };
    }
    return y;
}

}  // namespace scc::nn
