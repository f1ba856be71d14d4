#include "train.hpp"

#include "error.hpp"

namespace scadatd {

CpaprDetector train_cpapr(const TensorBuild& build, std::size_t rank, const FitOptions& options) {
    FitResult rank1 = fit_cpapr(build.tensor, 1, options);
    FitResult rank_r = fit_cpapr(build.tensor, rank, options);

    CpaprDetector d;
    d.codebook = build.codebook;
    d.rank = rank;
    d.final_objective = rank_r.objective_trace.back();
    d.model = fuse(std::move(rank1.model), std::move(rank_r.model));
    return d;
}

NmfDetector train_nmf(const MessageStream& records, MatrixSchema schema, std::size_t rank,
                      const FitOptions& options) {
    MatrixBuild build = build_matrix(records, schema);

    NmfDetector d;
    d.schema = schema;
    d.rows = std::move(build.rows);
    d.cols = std::move(build.cols);
    d.inflation_constant = build.inflation_constant;
    d.model = nmf_fit(build.matrix, rank, options);
    d.final_objective = kl_objective(build.matrix, d.model.smoothed.rank_r);
    return d;
}

PcaDetector train_pca(const MessageStream& records, std::size_t target_bins, double variance_target) {
    TensorBuild build = build_tensor(records, TensorSchema::ipct, target_bins);

    PcaDetector d;
    d.codebook = std::move(build.codebook);
    d.model = pca_fit(records, d.codebook, variance_target);
    return d;
}

} // namespace scadatd
