#pragma once

#include <cstdint>
#include <vector>

#include "dce/layers.hpp"

namespace dce {

struct EmaParams {
    double alpha = 0.5;  // in (0, 1]
};

// Naive next-session predictors. `i` is the 1-based session index being
// predicted from embeddings s_1..s_{i-1}; all require i >= 2.

Vec previous_predictor(const std::vector<Vec>& history_embeddings, std::size_t i);

Vec average_predictor(const std::vector<Vec>& history_embeddings, std::size_t i);

// Unnormalized exponentially weighted sum
//   alpha * sum_{k=1..i-1} (1-alpha)^(i-1-k) s_k
// evaluated literally (the weights do not sum to one; cosine-distance
// evaluation is invariant to the missing normalization).
Vec ema_predictor(const std::vector<Vec>& history_embeddings, std::size_t i, const EmaParams& p);

struct EmaFitConfig {
    double init_alpha = 0.5;
    std::size_t iterations = 500;
    double lr = 0.1;  // on the unconstrained logit of alpha
};

struct EmaFitResult {
    EmaParams params;
    double train_distance = 0.0;  // mean cosine distance at the fitted alpha
};

// Fits alpha by full-batch gradient descent on theta with alpha =
// sigmoid(theta), minimizing the mean cosine distance between the EMA
// prediction and the actual embedding over all (customer, i >= 2) pairs.
EmaFitResult fit_ema_alpha(const std::vector<std::vector<Vec>>& train_embeddings_by_customer,
                           const EmaFitConfig& cfg);

}  // namespace dce
