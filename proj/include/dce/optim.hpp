#pragma once

#include <cstddef>
#include <vector>

#include "dce/tensor.hpp"

namespace dce {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Per-parameter first/second moment accumulators plus a shared step counter.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::size_t t = 0;

    static AdamState init_for(const std::vector<Param*>& params);
};

// Bias-corrected adaptive-moment update, applied in place from each param's
// gradient accumulator. Gradients are left untouched; callers zero them when
// starting the next accumulation.
void adam_step(const std::vector<Param*>& params, AdamState& state, const AdamConfig& cfg);

// Scales all gradients so their joint L2 norm is at most max_norm. Returns
// the pre-clip norm.
double clip_global_norm(const std::vector<Param*>& params, double max_norm);

}  // namespace dce
