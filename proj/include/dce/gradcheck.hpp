#pragma once

#include <functional>
#include <vector>

#include "dce/tensor.hpp"

namespace dce {

// Central finite-difference check of analytic gradients.
//
//   loss      pure forward pass evaluated at the current parameter values
//   backward  zeroes gradients, runs forward + backward, fills Param::grad
//
// Every coordinate of every listed parameter is perturbed by +/-eps. Returns
// the maximum relative error |analytic - numeric| / max(|analytic|, |numeric|,
// 1e-6); the floor holds near-zero coordinates to an absolute standard instead
// of a ratio of round-off residues. Throws NumericError if the loss is not
// finite anywhere it is evaluated.
double grad_check(const std::vector<Param*>& params, const std::function<double()>& loss,
                  const std::function<void()>& backward, double eps);

}  // namespace dce
