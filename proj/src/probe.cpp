#include "dce/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dce/errors.hpp"
#include "dce/optim.hpp"
#include "dce/rng.hpp"
#include "dce/tensor.hpp"

namespace dce {

std::vector<double> ProbeModel::score(const Vec& x) const {
    if (x.size() != n_features) throw DimensionError("probe: feature width mismatch");
    std::vector<double> out(n_classes, 0.0);
    for (std::size_t k = 0; k < n_classes; ++k) {
        if (!trained[k]) continue;
        double z = b[k];
        for (std::size_t j = 0; j < n_features; ++j)
            z += w[k][j] * (x[j] - mean[j]) / scale[j];
        out[k] = z;
    }
    return out;
}

ProbeModel fit_probe(const std::vector<Vec>& features,
                     const std::vector<std::vector<int>>& positives,
                     std::size_t n_classes, const ProbeConfig& cfg) {
    if (features.empty()) throw EmptyInputError("probe: no training rows");
    if (features.size() != positives.size())
        throw DimensionError("probe: features and labels differ in length");
    if (n_classes == 0) throw ConfigError("probe: n_classes must be positive");
    const std::size_t d = features[0].size();
    for (const Vec& x : features)
        if (x.size() != d) throw DimensionError("probe: ragged feature rows");

    Rng rng(cfg.seed);
    std::vector<std::size_t> rows(features.size());
    std::iota(rows.begin(), rows.end(), 0);
    if (rows.size() > cfg.max_rows) {
        rng.shuffle(rows);
        rows.resize(cfg.max_rows);
        std::sort(rows.begin(), rows.end());
    }
    const std::size_t n = rows.size();

    ProbeModel model;
    model.n_features = d;
    model.n_classes = n_classes;
    model.mean.assign(d, 0.0);
    model.scale.assign(d, 1.0);
    for (std::size_t r : rows)
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += features[r][j];
    for (double& m : model.mean) m /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (std::size_t r : rows)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = features[r][j] - model.mean[j];
            var[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        model.scale[j] = sd > 1e-8 ? sd : 1.0;
    }

    // Standardize once up front; every epoch then reads the same dense matrix.
    std::vector<double> x(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            x[i * d + j] = (features[rows[i]][j] - model.mean[j]) / model.scale[j];

    std::vector<std::int8_t> y(n * n_classes, 0);
    std::vector<std::size_t> pos_count(n_classes, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (int c : positives[rows[i]]) {
            if (c < 0 || static_cast<std::size_t>(c) >= n_classes)
                throw IndexError("probe: label class out of range");
            if (!y[i * n_classes + static_cast<std::size_t>(c)]) {
                y[i * n_classes + static_cast<std::size_t>(c)] = 1;
                ++pos_count[static_cast<std::size_t>(c)];
            }
        }

    model.trained.assign(n_classes, false);
    std::size_t usable = 0;
    for (std::size_t k = 0; k < n_classes; ++k) {
        if (pos_count[k] == 0 || pos_count[k] == n)
            model.skipped_classes.push_back(k);
        else {
            model.trained[k] = true;
            ++usable;
        }
    }
    if (usable == 0) throw DegenerateError("probe: every class is one-sided");

    Param weight("probe.w", Tensor({n_classes, d}));
    Param bias("probe.b", Tensor({n_classes}));
    for (double& v : weight.value.data) v = 0.01 * rng.normal();
    std::vector<Param*> params = {&weight, &bias};
    AdamState adam = AdamState::init_for(params);
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;
    const double inv_n = 1.0 / static_cast<double>(n);
    double objective = 0.0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        zero_grads(params);
        objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = &x[i * d];
            for (std::size_t k = 0; k < n_classes; ++k) {
                if (!model.trained[k]) continue;
                const double* wk = &weight.value.data[k * d];
                double z = bias.value.data[k];
                for (std::size_t j = 0; j < d; ++j) z += wk[j] * xi[j];
                const double target = static_cast<double>(y[i * n_classes + k]);
                // log(1+e^z) - y z, computed on the stable side
                objective += inv_n * ((z > 0 ? z + std::log1p(std::exp(-z))
                                             : std::log1p(std::exp(z))) -
                                      target * z);
                const double p = 1.0 / (1.0 + std::exp(-z));
                const double dz = inv_n * (p - target);
                double* gw = &weight.grad.data[k * d];
                for (std::size_t j = 0; j < d; ++j) gw[j] += dz * xi[j];
                bias.grad.data[k] += dz;
            }
        }
        for (std::size_t k = 0; k < n_classes; ++k) {
            if (!model.trained[k]) continue;
            const double* wk = &weight.value.data[k * d];
            double* gw = &weight.grad.data[k * d];
            double sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                gw[j] += cfg.l2 * wk[j];
                sq += wk[j] * wk[j];
            }
            objective += 0.5 * cfg.l2 * sq;
        }
        if (!std::isfinite(objective)) throw NumericError("probe: non-finite objective");
        adam_step(params, adam, adam_cfg);
    }

    model.w.assign(n_classes, std::vector<double>(d, 0.0));
    model.b.assign(n_classes, 0.0);
    for (std::size_t k = 0; k < n_classes; ++k) {
        if (!model.trained[k]) continue;
        for (std::size_t j = 0; j < d; ++j) model.w[k][j] = weight.value.data[k * d + j];
        model.b[k] = bias.value.data[k];
    }
    model.final_objective = objective;
    return model;
}

std::vector<std::vector<double>> probe_scores(const ProbeModel& model,
                                              const std::vector<Vec>& features) {
    std::vector<std::vector<double>> out;
    out.reserve(features.size());
    for (const Vec& x : features) out.push_back(model.score(x));
    return out;
}

}  // namespace dce
