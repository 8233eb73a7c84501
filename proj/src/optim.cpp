#include "dce/optim.hpp"

#include <cmath>

#include "dce/errors.hpp"

namespace dce {

AdamState AdamState::init_for(const std::vector<Param*>& params) {
    AdamState state;
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Param* p : params) {
        state.m.push_back(Tensor::zeros(p->value.shape));
        state.v.push_back(Tensor::zeros(p->value.shape));
    }
    return state;
}

void adam_step(const std::vector<Param*>& params, AdamState& state, const AdamConfig& cfg) {
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw DimensionError("adam: state does not match parameter list");
    if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
        throw ConfigError("adam: betas must lie in [0,1)");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Param& p = *params[k];
        if (!p.grad.same_shape(p.value) || !state.m[k].same_shape(p.value))
            throw DimensionError("adam: gradient/state shape mismatch for " + p.name);
        double* m = state.m[k].data.data();
        double* v = state.v[k].data.data();
        double* x = p.value.data.data();
        const double* g = p.grad.data.data();
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            x[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

double clip_global_norm(const std::vector<Param*>& params, double max_norm) {
    double sq = 0.0;
    for (const Param* p : params)
        for (double g : p->grad.data) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (Param* p : params)
            for (double& g : p->grad.data) g *= scale;
    }
    return norm;
}

}  // namespace dce
