#include "cpapr.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace scadatd {

double KruskalModel::lambda_at(const std::vector<std::size_t>& index) const {
    if (index.size() != shape.size())
        raise(ErrorCode::invalid_argument, "model: index arity does not match tensor order");
    for (std::size_t d = 0; d < index.size(); ++d)
        if (index[d] >= shape[d])
            raise(ErrorCode::invalid_argument, "model: index out of bounds in dimension " + std::to_string(d));
    double total = 0.0;
    for (Eigen::Index r = 0; r < gamma.size(); ++r) {
        double term = gamma(r);
        for (std::size_t d = 0; d < factors.size(); ++d)
            term *= factors[d](static_cast<Eigen::Index>(index[d]), r);
        total += term;
    }
    return total;
}

double kl_objective(const SparseTensorCOO& tensor, const KruskalModel& model, double eps_div) {
    const std::size_t d = tensor.order();
    double log_term = 0.0;
    std::vector<std::size_t> index(d);
    for (std::size_t e = 0; e < tensor.nnz(); ++e) {
        for (std::size_t k = 0; k < d; ++k) index[k] = tensor.coord(e, k);
        const double rate = model.lambda_at(index);
        log_term += tensor.value(e) * std::log(std::max(rate, eps_div));
    }
    return model.gamma_sum() - log_term;
}

namespace {

void validate_options(const FitOptions& o) {
    if (o.max_outer == 0 || o.max_inner == 0)
        raise(ErrorCode::invalid_argument, "fit: iteration budgets must be positive");
    if (!(o.tol > 0.0)) raise(ErrorCode::invalid_argument, "fit: tolerance must be positive");
    if (!(o.kappa > 0.0) || !(o.kappa_tol > 0.0) || !(o.eps_div > 0.0))
        raise(ErrorCode::invalid_argument, "fit: guard constants must be positive");
}

// Khatri-Rao rows restricted to stored entries: row e is the elementwise
// product over the other modes of that mode's factor row at entry e.
void fill_pi(const SparseTensorCOO& tensor, const std::vector<Eigen::MatrixXd>& factors,
             std::size_t mode, Eigen::MatrixXd& pi) {
    const std::size_t d = tensor.order();
    const std::size_t nnz = tensor.nnz();
    pi.setOnes();
    for (std::size_t other = 0; other < d; ++other) {
        if (other == mode) continue;
        const Eigen::MatrixXd& f = factors[other];
        for (std::size_t e = 0; e < nnz; ++e)
            pi.row(static_cast<Eigen::Index>(e)).array() *=
                f.row(static_cast<Eigen::Index>(tensor.coord(e, other))).array();
    }
}

} // namespace

FitResult fit_cpapr(const SparseTensorCOO& tensor, std::size_t rank, const FitOptions& options) {
    validate_options(options);
    if (tensor.nnz() == 0) raise(ErrorCode::invalid_argument, "fit: tensor has no stored entries");
    if (rank < 1) raise(ErrorCode::invalid_argument, "fit: rank must be at least 1");

    const std::size_t d = tensor.order();
    const std::size_t nnz = tensor.nnz();
    const auto R = static_cast<Eigen::Index>(rank);

    FitResult result;
    KruskalModel& model = result.model;
    model.shape = tensor.shape();
    model.gamma = Eigen::VectorXd::Ones(R);
    model.factors.resize(d);

    Rng rng(options.seed);
    for (std::size_t m = 0; m < d; ++m) {
        const auto n = static_cast<Eigen::Index>(tensor.shape()[m]);
        Eigen::MatrixXd f(n, R);
        for (Eigen::Index j = 0; j < R; ++j)
            for (Eigen::Index i = 0; i < n; ++i) f(i, j) = rng.next_double();
        for (Eigen::Index j = 0; j < R; ++j) {
            const double s = f.col(j).sum();
            if (s > 0.0) f.col(j) /= s;
            else f.col(j).setConstant(1.0 / static_cast<double>(n));
        }
        model.factors[m] = std::move(f);
    }

    result.objective_trace.push_back(kl_objective(tensor, model, options.eps_div));

    // Per-mode Phi from the previous outer pass, used to spot entries pinned
    // at zero that the gradient wants to grow.
    std::vector<Eigen::MatrixXd> prev_phi(d);
    Eigen::MatrixXd pi(static_cast<Eigen::Index>(nnz), R);
    Eigen::VectorXd rates(static_cast<Eigen::Index>(nnz));

    double kkt = 0.0;
    for (std::size_t outer = 0; outer < options.max_outer; ++outer) {
        bool any_update = false;
        kkt = 0.0;

        for (std::size_t mode = 0; mode < d; ++mode) {
            const auto n = static_cast<Eigen::Index>(tensor.shape()[mode]);
            Eigen::MatrixXd b = model.factors[mode] * model.gamma.asDiagonal();

            if (outer > 0 && prev_phi[mode].size() > 0) {
                for (Eigen::Index j = 0; j < R; ++j)
                    for (Eigen::Index i = 0; i < n; ++i)
                        if (b(i, j) < options.kappa_tol && prev_phi[mode](i, j) > 1.0)
                            b(i, j) += options.kappa;
            }

            fill_pi(tensor, model.factors, mode, pi);

            Eigen::MatrixXd phi(n, R);
            for (std::size_t inner = 0; inner < options.max_inner; ++inner) {
                for (std::size_t e = 0; e < nnz; ++e) {
                    const auto ei = static_cast<Eigen::Index>(e);
                    const auto row = static_cast<Eigen::Index>(tensor.coord(e, mode));
                    rates(ei) = b.row(row).dot(pi.row(ei));
                }
                phi.setZero();
                for (std::size_t e = 0; e < nnz; ++e) {
                    const auto ei = static_cast<Eigen::Index>(e);
                    const auto row = static_cast<Eigen::Index>(tensor.coord(e, mode));
                    const double quotient = tensor.value(e) / std::max(rates(ei), options.eps_div);
                    phi.row(row) += quotient * pi.row(ei);
                }

                const double mode_violation =
                    b.array().min(1.0 - phi.array()).abs().maxCoeff();
                kkt = std::max(kkt, mode_violation);
                if (mode_violation <= options.tol) break;

                any_update = true;
                b.array() *= phi.array();
            }
            prev_phi[mode] = phi;

            // Absorb the column scale into gamma. A column that died keeps a
            // uniform factor so normalization stays well defined.
            for (Eigen::Index j = 0; j < R; ++j) {
                const double s = b.col(j).sum();
                model.gamma(j) = s;
                if (s > 0.0) model.factors[mode].col(j) = b.col(j) / s;
                else model.factors[mode].col(j).setConstant(1.0 / static_cast<double>(n));
            }
        }

        result.objective_trace.push_back(kl_objective(tensor, model, options.eps_div));
        result.outer_iterations = outer + 1;
        if (!any_update) {
            result.converged = true;
            break;
        }
    }
    result.final_kkt_violation = kkt;
    return result;
}

SmoothedModel fuse(KruskalModel rank1, KruskalModel rank_r, double w1, double wr) {
    if (rank1.rank() != 1)
        raise(ErrorCode::invalid_argument, "fuse: smoothing model must have rank 1");
    if (rank1.shape != rank_r.shape)
        raise(ErrorCode::invalid_argument, "fuse: model shapes differ");
    if (!(w1 > 0.0) || !(wr > 0.0) || std::fabs(w1 + wr - 1.0) > 1e-12)
        raise(ErrorCode::invalid_argument, "fuse: mixing weights must be positive and sum to 1");
    if (!(rank1.gamma(0) > 0.0))
        raise(ErrorCode::numeric, "fuse: rank-1 weight is not positive, smoothing cannot guarantee positive rates");
    for (std::size_t m = 0; m < rank1.factors.size(); ++m)
        if (!(rank1.factors[m].minCoeff() > 0.0))
            raise(ErrorCode::numeric, "fuse: rank-1 factor for mode " + std::to_string(m) +
                                          " has a non-positive entry, smoothing cannot guarantee positive rates");
    SmoothedModel s;
    s.rank1 = std::move(rank1);
    s.rank_r = std::move(rank_r);
    s.w1 = w1;
    s.wr = wr;
    return s;
}

} // namespace scadatd
