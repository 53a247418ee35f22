#ifndef TABADV_MODEL_AUC_HPP
#define TABADV_MODEL_AUC_HPP

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "tabadv/core/error.hpp"

namespace tabadv {

/// Area under the ROC curve as the Mann-Whitney statistic; tied scores
/// count one half.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
    const std::size_t n = scores.size();
    if (labels.size() != n) {
        throw ConfigError("auc: scores and labels differ in length");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum += avg_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw ConfigError("auc needs both classes");
    }
    const double np = static_cast<double>(n_pos);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

} // namespace tabadv

#endif
