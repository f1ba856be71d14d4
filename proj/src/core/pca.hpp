#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ingest.hpp"
#include "message.hpp"

namespace scadatd {

// Principal components over one-hot message features. The feature vector is
// the concatenation of one-hot blocks in the fixed order rtu, points,
// channel, time bin, with token order taken from the codebook's encoders.
struct PcaModel {
    Eigen::VectorXd mean;        // feature mean, length F
    Eigen::MatrixXd components;  // F x k, orthonormal columns
    std::size_t k = 0;
    double variance_target = 0.95;
    double variance_captured = 0.0;

    std::size_t feature_count() const { return static_cast<std::size_t>(mean.size()); }
};

// Hot feature positions for one record under the codebook's encoders.
// Unseen tokens contribute no position (their block stays all zero); a
// record with no gap cannot fill the time block and returns nullopt.
std::optional<std::vector<std::size_t>> pca_feature_indices(const Codebook& codebook,
                                                            const MessageRecord& record,
                                                            std::optional<std::int64_t> gap);

// Fits mean and principal directions from the stream; k is the smallest
// count of leading components whose eigenvalues capture at least
// variance_target of the total variance.
PcaModel pca_fit(const MessageStream& records, const Codebook& codebook,
                 double variance_target = 0.95);

// Squared reconstruction residual of the centered feature vector outside the
// component subspace. Higher means more anomalous.
double pca_score(const PcaModel& model, const Codebook& codebook, const MessageRecord& record,
                 std::optional<std::int64_t> gap);

// Residual mapped onto the p-value axis used everywhere else: 1 / (1 + score),
// so 1 means nominal and values near 0 mean anomalous.
double pca_pseudo_p(double score);

} // namespace scadatd
