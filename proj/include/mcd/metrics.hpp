#pragma once
// Binary classification metrics. The positive class is "all rubric items correct".

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace mcd {

struct MetricRow {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double auc = 0.5;
    double f1 = 0.0;
    bool auc_undefined = false;  // one class absent; auc reported as 0.5
};

struct AucResult {
    double value = 0.5;
    bool undefined = false;
};

/// Mann-Whitney rank statistic with mid-ranks for ties, i.e. the fraction of
/// positive/negative pairs ordered correctly with 0.5 credit per tie.
inline AucResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: size mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) {
                rank_sum_pos += mid_rank;
                ++n_pos;
            }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return {0.5, true};
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
    return {u / (np * static_cast<double>(n_neg)), false};
}

/// Threshold metrics (positive iff score > threshold) plus AUC. Precision and
/// recall are 0 when their denominators are 0; F1 is 0 when both are 0.
inline MetricRow binary_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
    if (scores.empty() || scores.size() != labels.size())
        throw std::invalid_argument("binary_metrics: need matching non-empty scores and labels");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] > threshold;
        const bool truth = labels[i] != 0;
        tp += pred && truth;
        fp += pred && !truth;
        tn += !pred && !truth;
        fn += !pred && truth;
    }
    MetricRow m;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
    m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    const AucResult auc = roc_auc(scores, labels);
    m.auc = auc.value;
    m.auc_undefined = auc.undefined;
    return m;
}

}  // namespace mcd
