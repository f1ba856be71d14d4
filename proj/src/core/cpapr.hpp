#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sparse_tensor.hpp"

namespace scadatd {

// Sum of R rank-one tensors: lambda at an index is the gamma-weighted product
// of one factor row per mode. After fitting, each factor column sums to 1 and
// the scale lives in gamma.
struct KruskalModel {
    std::vector<std::size_t> shape;
    Eigen::VectorXd gamma;                // length R
    std::vector<Eigen::MatrixXd> factors; // one N_d x R matrix per mode

    std::size_t rank() const { return static_cast<std::size_t>(gamma.size()); }
    std::size_t order() const { return factors.size(); }

    // Reconstructed Poisson rate at the index.
    double lambda_at(const std::vector<std::size_t>& index) const;

    // Equals the sum of reconstructed rates over every cell when factor
    // columns are normalized.
    double gamma_sum() const { return gamma.sum(); }
};

struct FitOptions {
    std::size_t max_outer = 200;  // outer iteration budget
    std::size_t max_inner = 10;   // multiplicative updates per mode per outer pass
    double tol = 1e-4;            // stop when every mode's KKT violation is at or below this
    double kappa = 1e-2;          // shift applied to inadmissible zeros
    double kappa_tol = 1e-10;     // entries below this count as zero for the shift
    double eps_div = 1e-10;       // rate floor inside the update quotient
    std::uint64_t seed = 0;
};

struct FitResult {
    KruskalModel model;
    std::vector<double> objective_trace; // KL objective after init, then after each outer pass
    std::size_t outer_iterations = 0;
    double final_kkt_violation = 0.0;
    bool converged = false;
};

// Fits a rank-R Poisson CP decomposition by KL multiplicative updates.
FitResult fit_cpapr(const SparseTensorCOO& tensor, std::size_t rank, const FitOptions& options = {});

// Sparse KL objective: sum of gamma minus sum over stored entries of
// x * log(rate), with rates floored at eps_div inside the log.
double kl_objective(const SparseTensorCOO& tensor, const KruskalModel& model, double eps_div = 1e-10);

// Convex blend of a rank-1 and a rank-R model over the same shape. The rank-1
// part keeps every blended rate strictly positive, so downstream tail
// probabilities never degenerate.
struct SmoothedModel {
    KruskalModel rank1;
    KruskalModel rank_r;
    double w1 = 0.1;
    double wr = 0.9;

    double lambda_at(const std::vector<std::size_t>& index) const {
        return w1 * rank1.lambda_at(index) + wr * rank_r.lambda_at(index);
    }
    const std::vector<std::size_t>& shape() const { return rank_r.shape; }
};

SmoothedModel fuse(KruskalModel rank1, KruskalModel rank_r, double w1 = 0.1, double wr = 0.9);

} // namespace scadatd
