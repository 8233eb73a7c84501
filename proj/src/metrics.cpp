#include "dce/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dce/errors.hpp"

namespace dce {

namespace {

void check_scores_labels(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw DimensionError("metrics: scores and labels differ in length");
    if (scores.empty()) throw EmptyInputError("metrics: no instances");
    for (double s : scores)
        if (!std::isfinite(s)) throw NumericError("metrics: non-finite score");
    for (int y : labels)
        if (y != 0 && y != 1) throw ConfigError("metrics: labels must be 0 or 1");
}

}  // namespace

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_scores_labels(scores, labels);
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += static_cast<std::size_t>(y);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateError("auroc: needs at least one positive and one negative");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tied blocks; rank sum of positives gives the U statistic.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MacroAurocResult macro_auroc(const std::vector<std::vector<double>>& scores,
                             const std::vector<std::vector<int>>& positives,
                             std::size_t n_classes) {
    if (scores.size() != positives.size())
        throw DimensionError("macro_auroc: scores and labels differ in length");
    if (scores.empty()) throw EmptyInputError("macro_auroc: no instances");
    for (const auto& row : scores)
        if (row.size() != n_classes)
            throw DimensionError("macro_auroc: score row width != n_classes");

    MacroAurocResult result;
    result.per_class.assign(n_classes, std::numeric_limits<double>::quiet_NaN());
    double total = 0.0;
    std::size_t scored = 0;
    std::vector<double> class_scores(scores.size());
    std::vector<int> class_labels(scores.size());
    for (std::size_t k = 0; k < n_classes; ++k) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            class_scores[i] = scores[i][k];
            class_labels[i] = 0;
            for (int c : positives[i])
                if (static_cast<std::size_t>(c) == k) class_labels[i] = 1;
        }
        const std::size_t n_pos = static_cast<std::size_t>(
            std::count(class_labels.begin(), class_labels.end(), 1));
        if (n_pos == 0 || n_pos == class_labels.size()) {
            result.skipped.push_back(k);
            continue;
        }
        result.per_class[k] = auroc(class_scores, class_labels);
        total += result.per_class[k];
        ++scored;
    }
    if (scored == 0) throw DegenerateError("macro_auroc: every class is degenerate");
    result.macro = total / static_cast<double>(scored);
    return result;
}

RecallAtRateResult recall_at_rate(const std::vector<double>& scores,
                                  const std::vector<int>& labels, double rate) {
    check_scores_labels(scores, labels);
    if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("recall_at_rate: rate must be in (0,1]");
    const std::size_t n = scores.size();

    RecallAtRateResult r;
    for (int y : labels) r.positives += static_cast<std::size_t>(y);
    if (r.positives == 0) throw DegenerateError("recall_at_rate: no positive instances");

    r.flagged = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
    r.flagged = std::min(r.flagged, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    for (std::size_t i = 0; i < r.flagged; ++i)
        if (labels[order[i]] == 1) ++r.hits;
    r.recall = static_cast<double>(r.hits) / static_cast<double>(r.positives);
    return r;
}

}  // namespace dce
