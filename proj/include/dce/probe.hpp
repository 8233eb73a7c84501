#pragma once

#include <cstdint>
#include <vector>

#include "dce/layers.hpp"

namespace dce {

struct ProbeConfig {
    std::size_t epochs = 200;      // full-batch gradient steps
    double lr = 0.05;
    double l2 = 1e-3;              // ridge penalty on weights, not biases
    std::size_t max_rows = 24000;  // seeded subsample cap on training rows
    std::uint64_t seed = 7;
};

// Frozen-feature linear readout: one-vs-rest logistic heads over standardized
// inputs. Heads whose training labels are one-sided stay at zero and are
// listed in skipped_classes.
struct ProbeModel {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> mean;
    std::vector<double> scale;              // 1 where the feature was constant
    std::vector<std::vector<double>> w;     // [class][feature]
    std::vector<double> b;
    std::vector<bool> trained;
    std::vector<std::size_t> skipped_classes;
    double final_objective = 0.0;

    // Per-class logits for one instance (untrained heads give 0).
    std::vector<double> score(const Vec& x) const;
};

// positives[i] lists the label classes of row i (use class 0 alone for a
// binary task). Throws EmptyInputError/DimensionError on malformed input and
// DegenerateError when every class is one-sided.
ProbeModel fit_probe(const std::vector<Vec>& features,
                     const std::vector<std::vector<int>>& positives,
                     std::size_t n_classes, const ProbeConfig& cfg);

std::vector<std::vector<double>> probe_scores(const ProbeModel& model,
                                              const std::vector<Vec>& features);

}  // namespace dce
