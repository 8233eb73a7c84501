#include "dce/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "dce/errors.hpp"

namespace dce {

namespace {

double finite_or_throw(double v) {
    if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss value");
    return v;
}

}  // namespace

double grad_check(const std::vector<Param*>& params, const std::function<double()>& loss,
                  const std::function<void()>& backward, double eps) {
    backward();
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (const Param* p : params) analytic.push_back(p->grad);

    double max_rel = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Param& p = *params[k];
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            const double saved = p.value.data[j];
            p.value.data[j] = saved + eps;
            const double up = finite_or_throw(loss());
            p.value.data[j] = saved - eps;
            const double down = finite_or_throw(loss());
            p.value.data[j] = saved;

            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic[k].data[j];
            // The 1e-6 floor keeps near-zero coordinates to an absolute
            // standard: central differences on a loss of magnitude L resolve
            // roughly ulp(L)/eps, so ratios against smaller gradients would
            // measure round-off, not correctness.
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
            max_rel = std::max(max_rel, std::fabs(a - numeric) / denom);
        }
    }
    return max_rel;
}

}  // namespace dce
