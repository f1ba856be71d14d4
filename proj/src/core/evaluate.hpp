#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cpapr.hpp"
#include "ingest.hpp"
#include "message.hpp"

namespace scadatd {

struct EvaluationReport {
    std::vector<std::pair<double, double>> roc; // (fpr, tpr), starts (0,0) ends (1,1)
    std::vector<std::pair<double, double>> pr;  // (recall, precision), starts at (0,1)
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    std::size_t n_anomalous = 0;
    std::size_t n_benign = 0;
};

// Curves and areas from (p-value, label) pairs. Lower p means more
// anomalous, so thresholds sweep p ascending; tied p-values move as one
// block. ROC area is trapezoidal (equals the Mann-Whitney statistic with
// half credit for ties); PR area is the average-precision step rule.
EvaluationReport roc_pr(const std::vector<std::pair<double, Label>>& scores);

// Convenience: pulls (p, label) pairs out of scored messages, ignoring any
// without a label.
EvaluationReport roc_pr_from_scores(const std::vector<struct ScoredMessage>& scored);

struct SweepResult {
    std::size_t best_rank = 0;
    std::vector<std::pair<std::size_t, double>> pr_aucs; // grid order
};

// Fits the tensor at every rank in the grid, scores the labeled validation
// stream, and keeps the rank with the highest PR area (ties go to the
// smallest rank). The rank-1 smoothing companion is fitted once and reused.
SweepResult rank_sweep(const SparseTensorCOO& tensor, const Codebook& codebook,
                       const MessageStream& validation, const std::vector<std::size_t>& grid,
                       const FitOptions& options = {});

// 1..50 by 1, then 55..100 by 5.
std::vector<std::size_t> default_rank_grid();

} // namespace scadatd
