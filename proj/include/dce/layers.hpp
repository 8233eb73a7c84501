#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dce/rng.hpp"
#include "dce/tensor.hpp"

namespace dce {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Fully connected layer: y = W x + b, W is (out, in).

Vec linear_forward(const Tensor& w, const Tensor& b, std::span<const double> x);

// Accumulates dW, db into the layer's gradient tensors; writes dL/dx into dx
// when non-null.
void linear_backward(Param& w, Param& b, std::span<const double> x, std::span<const double> dy,
                     Vec* dx);

struct Linear {
    Param w;
    Param b;

    Linear() = default;
    Linear(const std::string& name, std::size_t out, std::size_t in)
        : w(name + ".w", Tensor({out, in})), b(name + ".b", Tensor({out})) {}

    // Weights uniform in [-1/sqrt(in), +1/sqrt(in)], biases zero.
    void init(Rng& rng);

    std::size_t out_size() const { return w.value.shape[0]; }
    std::size_t in_size() const { return w.value.shape[1]; }

    Vec forward(std::span<const double> x) const { return linear_forward(w.value, b.value, x); }
    void backward(std::span<const double> x, std::span<const double> dy, Vec* dx) {
        linear_backward(w, b, x, dy, dx);
    }
    void collect(std::vector<Param*>& out) {
        out.push_back(&w);
        out.push_back(&b);
    }
};

// ---------------------------------------------------------------------------
// Embedding table: row lookup with one-hot scatter backward.

Vec embedding_lookup(const Tensor& table, std::size_t idx);
void embedding_backward(Param& table, std::size_t idx, std::span<const double> dy);

struct Embedding {
    Param table;

    Embedding() = default;
    Embedding(const std::string& name, std::size_t vocab, std::size_t dim)
        : table(name, Tensor({vocab, dim})) {}

    void init(Rng& rng, double bound = 0.1);

    std::size_t vocab() const { return table.value.shape[0]; }
    std::size_t dim() const { return table.value.shape[1]; }

    Vec forward(std::size_t idx) const { return embedding_lookup(table.value, idx); }
    void backward(std::size_t idx, std::span<const double> dy) {
        embedding_backward(table, idx, dy);
    }
    void collect(std::vector<Param*>& out) { out.push_back(&table); }
};

// ---------------------------------------------------------------------------
// LSTM cell. Gate blocks are stored contiguously in the order
// (input i, forget f, cell candidate g, output o):
//   a = W x + U h_prev + b
//   i = sigmoid(a[0:h])      f = sigmoid(a[h:2h])
//   g = tanh(a[2h:3h])       o = sigmoid(a[3h:4h])
//   c = f * c_prev + i * g   h = o * tanh(c)

struct LstmState {
    Vec h;
    Vec c;
};

struct LstmStepCache {
    Vec x, h_prev, c_prev;
    Vec i, f, g, o, c, tanh_c;
};

struct LstmCell {
    Param w;  // (4h, n)
    Param u;  // (4h, h)
    Param b;  // (4h)

    LstmCell() = default;
    LstmCell(const std::string& name, std::size_t input, std::size_t hidden)
        : w(name + ".w", Tensor({4 * hidden, input})),
          u(name + ".u", Tensor({4 * hidden, hidden})),
          b(name + ".b", Tensor({4 * hidden})) {}

    // Weights uniform in [-1/sqrt(h), +1/sqrt(h)], forget-gate bias 1, other
    // biases 0.
    void init(Rng& rng);

    std::size_t hidden_size() const { return u.value.shape[1]; }
    std::size_t input_size() const { return w.value.shape[1]; }

    LstmState zero_state() const { return {Vec(hidden_size(), 0.0), Vec(hidden_size(), 0.0)}; }

    // Pure forward step; fills cache (when non-null) for backward.
    LstmState step(std::span<const double> x, const LstmState& prev,
                   LstmStepCache* cache = nullptr) const;

    // Accumulates parameter gradients; emits input-side gradients. dh/dc are
    // the losses' gradients w.r.t. this step's outputs; dx, dh_prev, dc_prev
    // receive the chained gradients (accumulated into dh_prev/dc_prev so BPTT
    // can fold in the next step's carry).
    void backward(const LstmStepCache& cache, std::span<const double> dh,
                  std::span<const double> dc, Vec* dx, Vec* dh_prev, Vec* dc_prev);

    void collect(std::vector<Param*>& out) {
        out.push_back(&w);
        out.push_back(&u);
        out.push_back(&b);
    }
};

// ---------------------------------------------------------------------------
// One-hidden-layer MLP with tanh activation (smooth, so the whole model stays
// finite-difference checkable).

struct MlpCache {
    Vec x;
    Vec hidden;  // tanh activations
};

struct Mlp {
    Linear l1;
    Linear l2;

    Mlp() = default;
    Mlp(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out)
        : l1(name + ".l1", hidden, in), l2(name + ".l2", out, hidden) {}

    void init(Rng& rng) {
        l1.init(rng);
        l2.init(rng);
    }

    std::size_t out_size() const { return l2.out_size(); }
    std::size_t in_size() const { return l1.in_size(); }

    Vec forward(std::span<const double> x, MlpCache* cache = nullptr) const;
    void backward(const MlpCache& cache, std::span<const double> dy, Vec* dx);
    void collect(std::vector<Param*>& out) {
        l1.collect(out);
        l2.collect(out);
    }
};

// ---------------------------------------------------------------------------
// Cosine distance 1 - a.b / (max(|a|,eps) * max(|b|,eps)). Total and
// differentiable everywhere, including the zero vector.

inline constexpr double kCosineNormEpsilon = 1e-8;

double cosine_distance(std::span<const double> a, std::span<const double> b);

// Gradients of (upstream * cosine_distance(a, b)) accumulated into da/db.
void cosine_distance_backward(std::span<const double> a, std::span<const double> b,
                              double upstream, Vec* da, Vec* db);

// ---------------------------------------------------------------------------
// Softmax cross-entropy over one position.

double softmax_cross_entropy(std::span<const double> logits, std::size_t target);

// dL/dlogits = softmax(logits) - onehot(target), scaled by upstream and
// accumulated into dlogits.
void softmax_cross_entropy_backward(std::span<const double> logits, std::size_t target,
                                    double upstream, Vec* dlogits);

std::size_t argmax(std::span<const double> xs);

}  // namespace dce
