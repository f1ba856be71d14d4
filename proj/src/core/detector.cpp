#include "detector.hpp"

#include "error.hpp"
#include "poisson.hpp"

namespace scadatd {

std::string detector_kind(const Detector& detector) {
    if (std::holds_alternative<CpaprDetector>(detector)) return "cpapr";
    if (std::holds_alternative<NmfDetector>(detector)) return "nmf";
    return "pca";
}

std::string detector_tag(const Detector& detector) {
    if (const auto* c = std::get_if<CpaprDetector>(&detector))
        return "cpapr-" + schema_name(c->codebook.schema);
    if (const auto* n = std::get_if<NmfDetector>(&detector))
        return "nmf-" + matrix_schema_name(n->schema);
    return "pca";
}

std::size_t detector_rank(const Detector& detector) {
    if (const auto* c = std::get_if<CpaprDetector>(&detector)) return c->rank;
    if (const auto* n = std::get_if<NmfDetector>(&detector)) return n->model.rank();
    return std::get<PcaDetector>(detector).model.k;
}

double detector_objective(const Detector& detector) {
    if (const auto* c = std::get_if<CpaprDetector>(&detector)) return c->final_objective;
    if (const auto* n = std::get_if<NmfDetector>(&detector)) return n->final_objective;
    return std::get<PcaDetector>(detector).model.variance_captured;
}

namespace {

ScoreBatch score_nmf(const NmfDetector& d, const MessageStream& records) {
    ScoreBatch batch;
    batch.scored.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const MessageRecord& r = records[i];
        ScoredMessage s;
        s.row_id = i;
        s.record = r;
        const std::string col_token =
            d.schema == MatrixSchema::ixp ? std::to_string(r.points_requested) : r.channel;
        auto row = d.rows.index_of(r.rtu_id);
        auto col = d.cols.index_of(col_token);
        if (!row || !col) {
            s.oov = true;
            s.p_value = 0.0;
        } else {
            const double rate = d.model.rate_at(*row, *col);
            s.index = std::vector<std::size_t>{*row, *col};
            s.lambda = rate;
            s.p_value = poisson_tail(1, rate);
        }
        batch.scored.push_back(std::move(s));
    }
    return batch;
}

ScoreBatch score_pca(const PcaDetector& d, const MessageStream& records) {
    ScoreBatch batch;
    batch.scored.reserve(records.size());
    auto gaps = input_order_gaps(records);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const MessageRecord& r = records[i];
        if (!gaps[i]) {
            batch.skips.first_occurrence += 1;
            continue;
        }
        ScoredMessage s;
        s.row_id = i;
        s.record = r;
        s.oov = d.codebook.is_oov(r);
        s.p_value = pca_pseudo_p(pca_score(d.model, d.codebook, r, gaps[i]));
        batch.scored.push_back(std::move(s));
    }
    return batch;
}

} // namespace

ScoreBatch score_stream(const Detector& detector, const MessageStream& records) {
    if (const auto* c = std::get_if<CpaprDetector>(&detector))
        return score_batch(c->model, c->codebook, records);
    if (const auto* n = std::get_if<NmfDetector>(&detector)) return score_nmf(*n, records);
    return score_pca(std::get<PcaDetector>(detector), records);
}

} // namespace scadatd
