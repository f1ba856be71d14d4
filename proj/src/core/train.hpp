#pragma once

#include "detector.hpp"

namespace scadatd {

// Fits rank-1 and rank-R decompositions of the built tensor and blends them
// into a ready-to-score detector.
CpaprDetector train_cpapr(const TensorBuild& build, std::size_t rank, const FitOptions& options = {});

// Builds the layout's inflated occupancy matrix from the stream and fits the
// two-mode model, rank-1 companion included.
NmfDetector train_nmf(const MessageStream& records, MatrixSchema schema, std::size_t rank,
                      const FitOptions& options = {});

// Learns the four-mode codebook from the stream and fits the principal
// component subspace over its one-hot features.
PcaDetector train_pca(const MessageStream& records, std::size_t target_bins = 200,
                      double variance_target = 0.95);

} // namespace scadatd
