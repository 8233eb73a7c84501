#include "dce/layers.hpp"

#include <algorithm>
#include <cmath>

#include "dce/errors.hpp"

namespace dce {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require(bool ok, const char* msg) {
    if (!ok) throw DimensionError(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear

Vec linear_forward(const Tensor& w, const Tensor& b, std::span<const double> x) {
    require(w.shape.size() == 2, "linear: W must be a matrix");
    const std::size_t out = w.shape[0];
    const std::size_t in = w.shape[1];
    require(b.size() == out, "linear: bias width must equal output width");
    require(x.size() == in, "linear: input width mismatch");

    Vec y(out);
    const double* wd = w.data.data();
    for (std::size_t r = 0; r < out; ++r) {
        const double* row = wd + r * in;
        double acc = b.data[r];
        for (std::size_t c = 0; c < in; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

void linear_backward(Param& w, Param& b, std::span<const double> x, std::span<const double> dy,
                     Vec* dx) {
    const std::size_t out = w.value.shape[0];
    const std::size_t in = w.value.shape[1];
    require(x.size() == in, "linear backward: input width mismatch");
    require(dy.size() == out, "linear backward: upstream width mismatch");

    double* wg = w.grad.data.data();
    for (std::size_t r = 0; r < out; ++r) {
        const double g = dy[r];
        b.grad.data[r] += g;
        double* grow = wg + r * in;
        for (std::size_t c = 0; c < in; ++c) grow[c] += g * x[c];
    }
    if (dx) {
        dx->assign(in, 0.0);
        const double* wd = w.value.data.data();
        for (std::size_t r = 0; r < out; ++r) {
            const double g = dy[r];
            const double* row = wd + r * in;
            for (std::size_t c = 0; c < in; ++c) (*dx)[c] += row[c] * g;
        }
    }
}

void Linear::init(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_size()));
    for (double& v : w.value.data) v = rng.uniform(-bound, bound);
    b.value.fill(0.0);
}

// ---------------------------------------------------------------------------
// Embedding

Vec embedding_lookup(const Tensor& table, std::size_t idx) {
    require(table.shape.size() == 2, "embedding: table must be a matrix");
    if (idx >= table.shape[0]) throw IndexError("embedding: index out of range");
    const std::size_t dim = table.shape[1];
    const double* row = table.data.data() + idx * dim;
    return Vec(row, row + dim);
}

void embedding_backward(Param& table, std::size_t idx, std::span<const double> dy) {
    if (idx >= table.value.shape[0]) throw IndexError("embedding: index out of range");
    const std::size_t dim = table.value.shape[1];
    require(dy.size() == dim, "embedding backward: upstream width mismatch");
    double* row = table.grad.data.data() + idx * dim;
    for (std::size_t c = 0; c < dim; ++c) row[c] += dy[c];
}

void Embedding::init(Rng& rng, double bound) {
    for (double& v : table.value.data) v = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------------------
// LSTM cell

void LstmCell::init(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size()));
    for (double& v : w.value.data) v = rng.uniform(-bound, bound);
    for (double& v : u.value.data) v = rng.uniform(-bound, bound);
    const std::size_t h = hidden_size();
    b.value.fill(0.0);
    for (std::size_t j = h; j < 2 * h; ++j) b.value.data[j] = 1.0;  // forget gate
}

LstmState LstmCell::step(std::span<const double> x, const LstmState& prev,
                         LstmStepCache* cache) const {
    const std::size_t n = input_size();
    const std::size_t h = hidden_size();
    require(x.size() == n, "lstm: input width mismatch");
    require(prev.h.size() == h && prev.c.size() == h, "lstm: state width mismatch");

    Vec a(b.value.data);  // 4h preactivations, seeded with bias
    const double* wd = w.value.data.data();
    const double* ud = u.value.data.data();
    for (std::size_t r = 0; r < 4 * h; ++r) {
        const double* wrow = wd + r * n;
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += wrow[c] * x[c];
        const double* urow = ud + r * h;
        for (std::size_t c = 0; c < h; ++c) acc += urow[c] * prev.h[c];
        a[r] += acc;
    }

    LstmState next{Vec(h), Vec(h)};
    Vec gi(h), gf(h), gg(h), go(h), tc(h);
    for (std::size_t j = 0; j < h; ++j) {
        gi[j] = sigmoid(a[j]);
        gf[j] = sigmoid(a[h + j]);
        gg[j] = std::tanh(a[2 * h + j]);
        go[j] = sigmoid(a[3 * h + j]);
        next.c[j] = gf[j] * prev.c[j] + gi[j] * gg[j];
        tc[j] = std::tanh(next.c[j]);
        next.h[j] = go[j] * tc[j];
    }

    if (cache) {
        cache->x.assign(x.begin(), x.end());
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->i = std::move(gi);
        cache->f = std::move(gf);
        cache->g = std::move(gg);
        cache->o = std::move(go);
        cache->c = next.c;
        cache->tanh_c = std::move(tc);
    }
    return next;
}

void LstmCell::backward(const LstmStepCache& cache, std::span<const double> dh,
                        std::span<const double> dc, Vec* dx, Vec* dh_prev, Vec* dc_prev) {
    const std::size_t n = input_size();
    const std::size_t h = hidden_size();
    require(dh.size() == h && dc.size() == h, "lstm backward: upstream width mismatch");

    Vec da(4 * h);
    Vec dc_total(h);
    for (std::size_t j = 0; j < h; ++j) {
        const double do_ = dh[j] * cache.tanh_c[j];
        dc_total[j] = dc[j] + dh[j] * cache.o[j] * (1.0 - cache.tanh_c[j] * cache.tanh_c[j]);
        const double di = dc_total[j] * cache.g[j];
        const double df = dc_total[j] * cache.c_prev[j];
        const double dg = dc_total[j] * cache.i[j];
        da[j] = di * cache.i[j] * (1.0 - cache.i[j]);
        da[h + j] = df * cache.f[j] * (1.0 - cache.f[j]);
        da[2 * h + j] = dg * (1.0 - cache.g[j] * cache.g[j]);
        da[3 * h + j] = do_ * cache.o[j] * (1.0 - cache.o[j]);
    }

    double* wg = w.grad.data.data();
    double* ug = u.grad.data.data();
    for (std::size_t r = 0; r < 4 * h; ++r) {
        const double g = da[r];
        b.grad.data[r] += g;
        double* wrow = wg + r * n;
        for (std::size_t c = 0; c < n; ++c) wrow[c] += g * cache.x[c];
        double* urow = ug + r * h;
        for (std::size_t c = 0; c < h; ++c) urow[c] += g * cache.h_prev[c];
    }

    if (dx) {
        dx->assign(n, 0.0);
        const double* wd = w.value.data.data();
        for (std::size_t r = 0; r < 4 * h; ++r) {
            const double g = da[r];
            const double* row = wd + r * n;
            for (std::size_t c = 0; c < n; ++c) (*dx)[c] += row[c] * g;
        }
    }
    if (dh_prev) {
        if (dh_prev->size() != h) dh_prev->assign(h, 0.0);
        const double* ud = u.value.data.data();
        for (std::size_t r = 0; r < 4 * h; ++r) {
            const double g = da[r];
            const double* row = ud + r * h;
            for (std::size_t c = 0; c < h; ++c) (*dh_prev)[c] += row[c] * g;
        }
    }
    if (dc_prev) {
        if (dc_prev->size() != h) dc_prev->assign(h, 0.0);
        for (std::size_t j = 0; j < h; ++j) (*dc_prev)[j] += dc_total[j] * cache.f[j];
    }
}

// ---------------------------------------------------------------------------
// MLP

Vec Mlp::forward(std::span<const double> x, MlpCache* cache) const {
    Vec hidden = l1.forward(x);
    for (double& v : hidden) v = std::tanh(v);
    Vec y = l2.forward(hidden);
    if (cache) {
        cache->x.assign(x.begin(), x.end());
        cache->hidden = std::move(hidden);
    }
    return y;
}

void Mlp::backward(const MlpCache& cache, std::span<const double> dy, Vec* dx) {
    Vec dhidden;
    l2.backward(cache.hidden, dy, &dhidden);
    for (std::size_t j = 0; j < dhidden.size(); ++j)
        dhidden[j] *= 1.0 - cache.hidden[j] * cache.hidden[j];
    l1.backward(cache.x, dhidden, dx);
}

// ---------------------------------------------------------------------------
// Cosine distance

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size() && !a.empty(), "cosine: vectors must have equal positive length");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        dot += a[j] * b[j];
        na += a[j] * a[j];
        nb += b[j] * b[j];
    }
    na = std::max(std::sqrt(na), kCosineNormEpsilon);
    nb = std::max(std::sqrt(nb), kCosineNormEpsilon);
    return 1.0 - dot / (na * nb);
}

void cosine_distance_backward(std::span<const double> a, std::span<const double> b,
                              double upstream, Vec* da, Vec* db) {
    require(a.size() == b.size() && !a.empty(), "cosine: vectors must have equal positive length");
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        dot += a[j] * b[j];
        na2 += a[j] * a[j];
        nb2 += b[j] * b[j];
    }
    const double na_raw = std::sqrt(na2);
    const double nb_raw = std::sqrt(nb2);
    const double na = std::max(na_raw, kCosineNormEpsilon);
    const double nb = std::max(nb_raw, kCosineNormEpsilon);
    const double inv = 1.0 / (na * nb);
    // d/da [1 - dot/(na*nb)] = -b/(na*nb) + dot*a/(na^3*nb); the norm term is
    // constant (zero derivative) on the epsilon branch of max().
    const bool a_live = na_raw > kCosineNormEpsilon;
    const bool b_live = nb_raw > kCosineNormEpsilon;
    if (da) {
        if (da->size() != a.size()) da->assign(a.size(), 0.0);
        for (std::size_t j = 0; j < a.size(); ++j) {
            double g = -b[j] * inv;
            if (a_live) g += dot * a[j] / (na * na * na * nb);
            (*da)[j] += upstream * g;
        }
    }
    if (db) {
        if (db->size() != b.size()) db->assign(b.size(), 0.0);
        for (std::size_t j = 0; j < b.size(); ++j) {
            double g = -a[j] * inv;
            if (b_live) g += dot * b[j] / (nb * nb * nb * na);
            (*db)[j] += upstream * g;
        }
    }
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy

double softmax_cross_entropy(std::span<const double> logits, std::size_t target) {
    if (target >= logits.size()) throw IndexError("cross-entropy: target out of range");
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    return std::log(sum) - (logits[target] - mx);
}

void softmax_cross_entropy_backward(std::span<const double> logits, std::size_t target,
                                    double upstream, Vec* dlogits) {
    if (target >= logits.size()) throw IndexError("cross-entropy: target out of range");
    if (dlogits->size() != logits.size()) dlogits->assign(logits.size(), 0.0);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    for (std::size_t j = 0; j < logits.size(); ++j) {
        const double p = std::exp(logits[j] - mx) / sum;
        (*dlogits)[j] += upstream * (p - (j == target ? 1.0 : 0.0));
    }
}

std::size_t argmax(std::span<const double> xs) {
    if (xs.empty()) throw EmptyInputError("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t j = 1; j < xs.size(); ++j)
        if (xs[j] > xs[best]) best = j;
    return best;
}

}  // namespace dce
