#include "dce/baselines.hpp"

#include <cmath>

#include "dce/errors.hpp"

namespace dce {

namespace {

void require_history(const std::vector<Vec>& embeddings, std::size_t i) {
    if (i < 2) throw InsufficientHistoryError("predictor requires i >= 2");
    if (embeddings.size() < i - 1)
        throw InsufficientHistoryError("predictor: history shorter than i-1");
    if (embeddings.empty()) throw EmptyInputError("predictor: empty history");
}

}  // namespace

Vec previous_predictor(const std::vector<Vec>& history_embeddings, std::size_t i) {
    require_history(history_embeddings, i);
    return history_embeddings[i - 2];
}

Vec average_predictor(const std::vector<Vec>& history_embeddings, std::size_t i) {
    require_history(history_embeddings, i);
    Vec mean(history_embeddings[0].size(), 0.0);
    for (std::size_t k = 0; k + 1 < i; ++k) {
        const Vec& s = history_embeddings[k];
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += s[j];
    }
    const double inv = 1.0 / static_cast<double>(i - 1);
    for (double& v : mean) v *= inv;
    return mean;
}

Vec ema_predictor(const std::vector<Vec>& history_embeddings, std::size_t i, const EmaParams& p) {
    require_history(history_embeddings, i);
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ConfigError("ema: alpha must be in (0,1]");
    Vec out(history_embeddings[0].size(), 0.0);
    // alpha * sum_{k=1..i-1} (1-alpha)^(i-1-k) s_k, with (1-alpha)^0 == 1 so
    // alpha == 1 reproduces the previous-session predictor bit-exactly.
    for (std::size_t k = 1; k <= i - 1; ++k) {
        const std::size_t power = i - 1 - k;
        const double w = p.alpha * (power == 0 ? 1.0 : std::pow(1.0 - p.alpha, static_cast<double>(power)));
        const Vec& s = history_embeddings[k - 1];
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * s[j];
    }
    return out;
}

EmaFitResult fit_ema_alpha(const std::vector<std::vector<Vec>>& train_embeddings_by_customer,
                           const EmaFitConfig& cfg) {
    std::size_t pairs = 0;
    for (const auto& h : train_embeddings_by_customer)
        if (h.size() >= 2) pairs += h.size() - 1;
    if (pairs == 0) throw ConfigError("fit_ema_alpha: no customer has two or more sessions");
    if (!(cfg.init_alpha > 0.0 && cfg.init_alpha < 1.0))
        throw ConfigError("fit_ema_alpha: init alpha must be in (0,1)");

    // Mean cosine distance over eligible pairs; EMA prediction and its
    // alpha-derivative evaluated by running recurrences:
    //   p_{i+1} = (1-a) p_i + a s_i,      p_2 = a s_1
    //   p'_{i+1} = (1-a) p'_i - p_i + s_i, p'_2 = s_1
    auto objective = [&](double alpha, double* dalpha) {
        double total = 0.0;
        double grad = 0.0;
        for (const auto& h : train_embeddings_by_customer) {
            if (h.size() < 2) continue;
            const std::size_t d = h[0].size();
            Vec p(d, 0.0), dp(d, 0.0);
            for (std::size_t idx = 1; idx < h.size(); ++idx) {
                // p predicts h[idx] from h[0..idx-1].
                for (std::size_t j = 0; j < d; ++j) {
                    const double prev_p = p[j];
                    p[j] = (1.0 - alpha) * prev_p + alpha * h[idx - 1][j];
                    dp[j] = (1.0 - alpha) * dp[j] - prev_p + h[idx - 1][j];
                }
                total += cosine_distance(p, h[idx]);
                if (dalpha) {
                    Vec dpred(d, 0.0);
                    cosine_distance_backward(p, h[idx], 1.0, &dpred, nullptr);
                    for (std::size_t j = 0; j < d; ++j) grad += dpred[j] * dp[j];
                }
            }
        }
        if (dalpha) *dalpha = grad / static_cast<double>(pairs);
        return total / static_cast<double>(pairs);
    };

    double theta = std::log(cfg.init_alpha / (1.0 - cfg.init_alpha));
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const double alpha = 1.0 / (1.0 + std::exp(-theta));
        double dalpha = 0.0;
        objective(alpha, &dalpha);
        theta -= cfg.lr * dalpha * alpha * (1.0 - alpha);
        if (!std::isfinite(theta)) throw NumericError("fit_ema_alpha: non-finite step");
    }

    EmaFitResult result;
    result.params.alpha = 1.0 / (1.0 + std::exp(-theta));
    result.train_distance = objective(result.params.alpha, nullptr);
    return result;
}

}  // namespace dce
