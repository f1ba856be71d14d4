#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "cpapr.hpp"
#include "encoding.hpp"
#include "message.hpp"
#include "sparse_tensor.hpp"

namespace scadatd {

// Two-mode factorization layouts used by the matrix baselines.
enum class MatrixSchema {
    ixp, // rtu x points
    ixc, // rtu x channel
};

std::string matrix_schema_name(MatrixSchema s);
MatrixSchema matrix_schema_from_name(const std::string& name);

// Default factorization ranks per layout.
std::size_t nmf_default_rank(MatrixSchema s);

struct MatrixBuild {
    MatrixSchema schema = MatrixSchema::ixp;
    DimensionEncoder rows; // rtu
    DimensionEncoder cols; // points or channel
    SparseTensorCOO matrix;
    long long inflation_constant = 1;
};

// Binary occupancy matrix over the layout's two modes, inflated to a mean
// near 1 so rates sit on the same scale as the tensor models.
MatrixBuild build_matrix(const MessageStream& records, MatrixSchema schema);

// KL-NMF is the two-mode case of the Poisson CP fit; the same multiplicative
// updates apply, and the same rank-1 blend keeps every rate positive.
struct NmfModel {
    SmoothedModel smoothed;

    std::size_t rank() const { return smoothed.rank_r.rank(); }
    double rate_at(std::size_t i, std::size_t j) const { return smoothed.lambda_at({i, j}); }

    // Conventional W/H views of the rank-K part: W = factor0 * diag(gamma),
    // H = factor1 transposed, so W * H reproduces the unfused rates.
    Eigen::MatrixXd w() const;
    Eigen::MatrixXd h() const;
    Eigen::VectorXd w1() const; // rank-1 companion, row side (scale absorbed)
    Eigen::VectorXd h1() const; // rank-1 companion, column side
};

NmfModel nmf_fit(const SparseTensorCOO& matrix, std::size_t rank, const FitOptions& options = {});

} // namespace scadatd
