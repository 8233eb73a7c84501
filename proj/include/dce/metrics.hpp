#pragma once

#include <cstddef>
#include <vector>

namespace dce {

// Mann-Whitney AUROC computed with midranks, so ties between a positive and
// a negative score half credit. Labels must be 0/1 with both classes present
// (DegenerateError otherwise); non-finite scores raise NumericError.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct MacroAurocResult {
    double macro = 0.0;                // mean over classes that could be scored
    std::vector<double> per_class;     // NaN at skipped classes
    std::vector<std::size_t> skipped;  // classes missing a positive or a negative
};

// One-vs-rest AUROC per class, averaged over the classes where both a
// positive and a negative instance exist. positives[i] lists the classes of
// instance i.
MacroAurocResult macro_auroc(const std::vector<std::vector<double>>& scores,
                             const std::vector<std::vector<int>>& positives,
                             std::size_t n_classes);

struct RecallAtRateResult {
    double recall = 0.0;
    std::size_t flagged = 0;  // ceil(rate * N)
    std::size_t hits = 0;
    std::size_t positives = 0;
};

// Flags the ceil(rate*N) top-scored instances -- ordered by score descending,
// ties broken toward the lower index -- and reports recall of the positives.
RecallAtRateResult recall_at_rate(const std::vector<double>& scores,
                                  const std::vector<int>& labels, double rate);

}  // namespace dce
