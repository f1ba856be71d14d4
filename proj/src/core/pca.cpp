#include "pca.hpp"

#include <algorithm>

#include "error.hpp"

namespace scadatd {

namespace {

// Block offsets in the fixed feature layout.
struct Layout {
    std::size_t rtu0, points0, channel0, time0, total;
};

Layout layout_of(const Codebook& cb) {
    if (cb.schema != TensorSchema::ipct)
        raise(ErrorCode::invalid_argument, "pca: feature layout needs the four-mode codebook");
    if (!cb.binning) raise(ErrorCode::data, "pca: codebook is missing its binning");
    Layout l{};
    l.rtu0 = 0;
    l.points0 = l.rtu0 + cb.rtu.size();
    l.channel0 = l.points0 + cb.points.size();
    l.time0 = l.channel0 + cb.channel.size();
    l.total = l.time0 + cb.binning->bin_count();
    return l;
}

} // namespace

std::optional<std::vector<std::size_t>> pca_feature_indices(const Codebook& codebook,
                                                            const MessageRecord& record,
                                                            std::optional<std::int64_t> gap) {
    const Layout l = layout_of(codebook);
    if (!gap) return std::nullopt;
    std::vector<std::size_t> hot;
    hot.reserve(4);
    if (auto i = codebook.rtu.index_of(record.rtu_id)) hot.push_back(l.rtu0 + *i);
    if (auto i = codebook.points.index_of(std::to_string(record.points_requested)))
        hot.push_back(l.points0 + *i);
    if (auto i = codebook.channel.index_of(record.channel)) hot.push_back(l.channel0 + *i);
    hot.push_back(l.time0 + codebook.binning->bin_of(*gap));
    return hot;
}

PcaModel pca_fit(const MessageStream& records, const Codebook& codebook, double variance_target) {
    if (records.size() < 2) raise(ErrorCode::data, "pca: need at least 2 training records");
    if (!(variance_target > 0.0) || variance_target > 1.0)
        raise(ErrorCode::invalid_argument, "pca: variance target must be in (0, 1]");

    const Layout l = layout_of(codebook);
    const auto F = static_cast<Eigen::Index>(l.total);

    // Records are one-hot with at most 4 active features, so the second
    // moment accumulates over hot-index pairs instead of dense outer
    // products.
    auto gaps = input_order_gaps(records);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(F);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(F, F);
    std::size_t n = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto hot = pca_feature_indices(codebook, records[i], gaps[i]);
        if (!hot) continue; // first occurrence: no time feature to fill
        ++n;
        for (std::size_t a : hot.value()) {
            sum(static_cast<Eigen::Index>(a)) += 1.0;
            for (std::size_t b : hot.value())
                second(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += 1.0;
        }
    }
    if (n < 2) raise(ErrorCode::data, "pca: fewer than 2 encodable training records");

    PcaModel model;
    model.variance_target = variance_target;
    model.mean = sum / static_cast<double>(n);
    Eigen::MatrixXd cov = second / static_cast<double>(n) - model.mean * model.mean.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) raise(ErrorCode::numeric, "pca: eigendecomposition failed");
    const Eigen::VectorXd& evals = solver.eigenvalues(); // ascending
    const Eigen::MatrixXd& evecs = solver.eigenvectors();

    double total = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) total += std::max(evals(i), 0.0);
    if (!(total > 0.0)) raise(ErrorCode::data, "pca: zero total variance (all records identical)");

    // Walk eigenvalues from largest down until the target share is covered,
    // never counting numerically-zero directions toward k.
    const double floor = 1e-12 * total;
    double captured = 0.0;
    std::vector<Eigen::Index> chosen;
    for (Eigen::Index i = evals.size() - 1; i >= 0; --i) {
        const double v = std::max(evals(i), 0.0);
        if (v <= floor) break;
        chosen.push_back(i);
        captured += v;
        if (captured >= variance_target * total - 1e-12 * total) break;
    }
    if (chosen.empty()) raise(ErrorCode::numeric, "pca: no usable principal directions");

    model.k = chosen.size();
    model.components.resize(F, static_cast<Eigen::Index>(model.k));
    for (std::size_t j = 0; j < chosen.size(); ++j)
        model.components.col(static_cast<Eigen::Index>(j)) = evecs.col(chosen[j]);
    model.variance_captured = captured / total;
    return model;
}

double pca_score(const PcaModel& model, const Codebook& codebook, const MessageRecord& record,
                 std::optional<std::int64_t> gap) {
    auto hot = pca_feature_indices(codebook, record, gap);
    if (!hot) raise(ErrorCode::invalid_argument, "pca: record without a gap has no time feature");

    // centered = x - mean, with x one-hot over the hot indices
    Eigen::VectorXd centered = -model.mean;
    for (std::size_t a : hot.value()) centered(static_cast<Eigen::Index>(a)) += 1.0;

    const Eigen::VectorXd proj = model.components.transpose() * centered;
    const double residual = centered.squaredNorm() - proj.squaredNorm();
    return std::max(residual, 0.0);
}

double pca_pseudo_p(double score) {
    if (score < 0.0) raise(ErrorCode::invalid_argument, "pca: score must be non-negative");
    return 1.0 / (1.0 + score);
}

} // namespace scadatd
