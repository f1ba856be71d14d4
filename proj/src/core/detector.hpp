#pragma once

#include <string>
#include <variant>

#include "cpapr.hpp"
#include "ingest.hpp"
#include "nmf.hpp"
#include "pca.hpp"
#include "scoring.hpp"

namespace scadatd {

// A trained tensor model plus everything needed to score raw messages.
struct CpaprDetector {
    Codebook codebook;
    SmoothedModel model;
    std::size_t rank = 1;          // of the rank-R part
    double final_objective = 0.0;  // KL objective of the rank-R fit
};

struct NmfDetector {
    MatrixSchema schema = MatrixSchema::ixp;
    DimensionEncoder rows;
    DimensionEncoder cols;
    NmfModel model;
    long long inflation_constant = 1;
    double final_objective = 0.0;
};

struct PcaDetector {
    Codebook codebook; // four-mode layout; defines the one-hot feature blocks
    PcaModel model;
};

using Detector = std::variant<CpaprDetector, NmfDetector, PcaDetector>;

// Short identifier: "cpapr", "nmf", or "pca".
std::string detector_kind(const Detector& detector);

// Identifier including the layout, e.g. "cpapr-IPC", "nmf-IxP", "pca".
// Used for the model column in baseline score files.
std::string detector_tag(const Detector& detector);

std::size_t detector_rank(const Detector& detector);
double detector_objective(const Detector& detector);

// Scores a stream under any detector kind, producing the same batch shape
// everywhere. NMF marks unseen row/column tokens OOV with p = 0. PCA scores
// unseen tokens through their all-zero feature block (higher residual, lower
// pseudo-p) rather than pinning them to 0, but still flags them.
ScoreBatch score_stream(const Detector& detector, const MessageStream& records);

} // namespace scadatd
