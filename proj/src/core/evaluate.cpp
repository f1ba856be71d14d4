#include "evaluate.hpp"

#include <algorithm>

#include "error.hpp"
#include "scoring.hpp"

namespace scadatd {

EvaluationReport roc_pr(const std::vector<std::pair<double, Label>>& scores) {
    EvaluationReport report;
    for (const auto& [p, label] : scores)
        (label == Label::anomalous ? report.n_anomalous : report.n_benign) += 1;
    if (report.n_anomalous == 0) raise(ErrorCode::data, "evaluate: no anomalous examples in input");
    if (report.n_benign == 0) raise(ErrorCode::data, "evaluate: no benign examples in input");

    // Ascending p = descending anomaly score. Ties collapse into one
    // threshold step so the curves never depend on input order.
    std::vector<std::pair<double, Label>> sorted = scores;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const double npos = static_cast<double>(report.n_anomalous);
    const double nneg = static_cast<double>(report.n_benign);

    report.roc.emplace_back(0.0, 0.0);
    report.pr.emplace_back(0.0, 1.0);

    double tp = 0.0, fp = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0, prev_recall = 0.0;
    double roc_auc = 0.0, pr_auc = 0.0;

    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].first == sorted[i].first) {
            (sorted[j].second == Label::anomalous ? tp : fp) += 1.0;
            ++j;
        }
        i = j;

        const double fpr = fp / nneg;
        const double tpr = tp / npos;
        const double recall = tpr;
        const double precision = tp / (tp + fp);

        roc_auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        pr_auc += (recall - prev_recall) * precision;

        report.roc.emplace_back(fpr, tpr);
        report.pr.emplace_back(recall, precision);
        prev_fpr = fpr;
        prev_tpr = tpr;
        prev_recall = recall;
    }

    report.roc_auc = roc_auc;
    report.pr_auc = pr_auc;
    return report;
}

EvaluationReport roc_pr_from_scores(const std::vector<ScoredMessage>& scored) {
    std::vector<std::pair<double, Label>> pairs;
    pairs.reserve(scored.size());
    for (const auto& s : scored)
        if (s.record.label) pairs.emplace_back(s.p_value, *s.record.label);
    return roc_pr(pairs);
}

SweepResult rank_sweep(const SparseTensorCOO& tensor, const Codebook& codebook,
                       const MessageStream& validation, const std::vector<std::size_t>& grid,
                       const FitOptions& options) {
    if (grid.empty()) raise(ErrorCode::invalid_argument, "sweep: empty rank grid");
    for (std::size_t r : grid)
        if (r < 1) raise(ErrorCode::invalid_argument, "sweep: ranks must be at least 1");

    FitResult rank1 = fit_cpapr(tensor, 1, options);

    SweepResult result;
    double best = -1.0;
    for (std::size_t r : grid) {
        double auc = 0.0;
        try {
            FitResult fitted = fit_cpapr(tensor, r, options);
            SmoothedModel model = fuse(rank1.model, std::move(fitted.model));
            ScoreBatch batch = score_batch(model, codebook, validation);
            auc = roc_pr_from_scores(batch.scored).pr_auc;
        } catch (const Error& e) {
            raise(e.code(), "sweep: rank " + std::to_string(r) + ": " + e.what());
        }
        result.pr_aucs.emplace_back(r, auc);
        if (auc > best || (auc == best && r < result.best_rank)) {
            best = auc;
            result.best_rank = r;
        }
    }
    return result;
}

std::vector<std::size_t> default_rank_grid() {
    std::vector<std::size_t> grid;
    for (std::size_t r = 1; r <= 50; ++r) grid.push_back(r);
    for (std::size_t r = 55; r <= 100; r += 5) grid.push_back(r);
    return grid;
}

} // namespace scadatd
