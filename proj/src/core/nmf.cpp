#include "nmf.hpp"

#include "error.hpp"

namespace scadatd {

std::string matrix_schema_name(MatrixSchema s) {
    switch (s) {
        case MatrixSchema::ixp: return "IxP";
        case MatrixSchema::ixc: return "IxC";
    }
    raise(ErrorCode::invalid_argument, "unknown matrix schema");
}

MatrixSchema matrix_schema_from_name(const std::string& name) {
    if (name == "IxP" || name == "ixp" || name == "IXP") return MatrixSchema::ixp;
    if (name == "IxC" || name == "ixc" || name == "IXC") return MatrixSchema::ixc;
    raise(ErrorCode::invalid_argument, "unknown matrix schema '" + name + "' (want IxP or IxC)");
}

std::size_t nmf_default_rank(MatrixSchema s) {
    return s == MatrixSchema::ixp ? 24 : 14;
}

MatrixBuild build_matrix(const MessageStream& records, MatrixSchema schema) {
    if (records.empty()) raise(ErrorCode::data, "matrix build: empty message stream");
    MatrixBuild build;
    build.schema = schema;

    std::vector<std::string> row_tokens, col_tokens;
    row_tokens.reserve(records.size());
    col_tokens.reserve(records.size());
    for (const auto& r : records) {
        row_tokens.push_back(r.rtu_id);
        col_tokens.push_back(schema == MatrixSchema::ixp ? std::to_string(r.points_requested) : r.channel);
    }
    build.rows = DimensionEncoder::from_tokens(row_tokens);
    build.cols = DimensionEncoder::from_tokens(col_tokens);

    SparseTensorCOO m({build.rows.size(), build.cols.size()});
    for (std::size_t i = 0; i < records.size(); ++i)
        m.add({*build.rows.index_of(row_tokens[i]), *build.cols.index_of(col_tokens[i])}, 1.0);
    m.finalize();
    m.binarize();
    build.inflation_constant = m.inflate_binary();
    build.matrix = std::move(m);
    return build;
}

NmfModel nmf_fit(const SparseTensorCOO& matrix, std::size_t rank, const FitOptions& options) {
    if (matrix.order() != 2)
        raise(ErrorCode::invalid_argument, "nmf: input must have exactly 2 modes, got " +
                                               std::to_string(matrix.order()));
    FitResult rank1 = fit_cpapr(matrix, 1, options);
    FitResult rank_k = fit_cpapr(matrix, rank, options);
    NmfModel model;
    model.smoothed = fuse(std::move(rank1.model), std::move(rank_k.model));
    return model;
}

Eigen::MatrixXd NmfModel::w() const {
    return smoothed.rank_r.factors[0] * smoothed.rank_r.gamma.asDiagonal();
}

Eigen::MatrixXd NmfModel::h() const {
    return smoothed.rank_r.factors[1].transpose();
}

Eigen::VectorXd NmfModel::w1() const {
    return smoothed.rank1.factors[0] * smoothed.rank1.gamma(0);
}

Eigen::VectorXd NmfModel::h1() const {
    return smoothed.rank1.factors[1];
}

} // namespace scadatd
