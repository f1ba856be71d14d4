#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "core/cpapr.hpp"
#include "core/error.hpp"
#include "core/sparse_tensor.hpp"

using namespace scadatd;

namespace {

// Runs an odometer over every cell of the shape.
template <typename Fn>
void for_each_cell(const std::vector<std::size_t>& shape, Fn&& fn) {
    std::vector<std::size_t> idx(shape.size(), 0);
    while (true) {
        fn(idx);
        std::size_t d = shape.size();
        while (d > 0) {
            --d;
            if (++idx[d] < shape[d]) break;
            idx[d] = 0;
            if (d == 0) return;
        }
    }
}

SparseTensorCOO constant_tensor(const std::vector<std::size_t>& shape, double value) {
    SparseTensorCOO t(shape);
    for_each_cell(shape, [&](const std::vector<std::size_t>& idx) { t.add(idx, value); });
    t.finalize();
    return t;
}

SparseTensorCOO random_count_tensor(const std::vector<std::size_t>& shape, double fill,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 8);
    SparseTensorCOO t(shape);
    bool any = false;
    for_each_cell(shape, [&](const std::vector<std::size_t>& idx) {
        if (coin(rng) < fill) {
            t.add(idx, count(rng));
            any = true;
        }
    });
    if (!any) t.add(std::vector<std::size_t>(shape.size(), 0), 1.0);
    t.finalize();
    return t;
}

// All-cells objective, the quantity the sparse evaluation shortcut stands for.
double dense_objective(const SparseTensorCOO& tensor, const KruskalModel& model) {
    double total = 0.0;
    for_each_cell(tensor.shape(), [&](const std::vector<std::size_t>& idx) {
        const double lam = model.lambda_at(idx);
        total += lam;
        const double x = tensor.lookup(idx);
        if (x > 0.0) total -= x * std::log(std::max(lam, 1e-10));
    });
    return total;
}

// Rank-1 model whose rate is `rate` at every cell of a 2x2x2 tensor.
KruskalModel uniform_rank1_2x2x2(double rate) {
    KruskalModel m;
    m.shape = {2, 2, 2};
    m.gamma = Eigen::VectorXd::Constant(1, rate * 8.0);
    m.factors.assign(3, Eigen::MatrixXd::Constant(2, 1, 0.5));
    return m;
}

bool factors_identical(const KruskalModel& a, const KruskalModel& b) {
    if ((a.gamma.array() != b.gamma.array()).any()) return false;
    for (std::size_t m = 0; m < a.factors.size(); ++m)
        if ((a.factors[m].array() != b.factors[m].array()).any()) return false;
    return true;
}

} // namespace

TEST_CASE("rank-1 fit of a constant tensor recovers the constant") {
    const SparseTensorCOO t = constant_tensor({3, 3, 3}, 4.0);
    const FitResult r = fit_cpapr(t, 1, {});
    CHECK(r.converged);
    for_each_cell(t.shape(), [&](const std::vector<std::size_t>& idx) {
        CHECK(r.model.lambda_at(idx) == doctest::Approx(4.0).epsilon(0.0025));
    });
}

TEST_CASE("reconstruction follows the weighted factor products") {
    SUBCASE("uniform rank-1 rates") {
        const KruskalModel m = uniform_rank1_2x2x2(1.0);
        for_each_cell(m.shape, [&](const std::vector<std::size_t>& idx) {
            CHECK(m.lambda_at(idx) == doctest::Approx(1.0).epsilon(1e-15));
        });
    }
    SUBCASE("hand-set rank-2 model matches per-cell summation") {
        KruskalModel m;
        m.shape = {2, 3, 2};
        m.gamma = Eigen::VectorXd(2);
        m.gamma << 5.0, 2.0;
        m.factors = {Eigen::MatrixXd(2, 2), Eigen::MatrixXd(3, 2), Eigen::MatrixXd(2, 2)};
        m.factors[0] << 0.3, 0.9, 0.7, 0.1;
        m.factors[1] << 0.2, 0.5, 0.5, 0.25, 0.3, 0.25;
        m.factors[2] << 0.6, 0.5, 0.4, 0.5;
        for_each_cell(m.shape, [&](const std::vector<std::size_t>& idx) {
            double want = 0.0;
            for (int r = 0; r < 2; ++r)
                want += m.gamma(r) * m.factors[0](idx[0], r) * m.factors[1](idx[1], r) *
                        m.factors[2](idx[2], r);
            CHECK(m.lambda_at(idx) == doctest::Approx(want).epsilon(1e-14));
        });
        // Normalized columns: rates over all cells add up to the gamma total.
        double total = 0.0;
        for_each_cell(m.shape, [&](const std::vector<std::size_t>& idx) { total += m.lambda_at(idx); });
        CHECK(total == doctest::Approx(m.gamma_sum()).epsilon(1e-12));
    }
    SUBCASE("out-of-bounds index is rejected") {
        const KruskalModel m = uniform_rank1_2x2x2(1.0);
        CHECK_THROWS_AS(m.lambda_at({2, 0, 0}), Error);
        CHECK_THROWS_AS(m.lambda_at({0, 0}), Error);
    }
}

TEST_CASE("objective never rises across outer passes and matches the dense oracle") {
    int checked = 0;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u, 6u}) {
        for (std::size_t rank : {1u, 2u, 3u}) {
            const SparseTensorCOO t = random_count_tensor({5, 4, 3}, 0.4, seed * 100 + rank);
            FitOptions opt;
            opt.seed = seed;
            const FitResult r = fit_cpapr(t, rank, opt);
            REQUIRE(r.objective_trace.size() >= 2);
            for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
                INFO("seed=", seed, " rank=", rank, " step=", k);
                CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-9);
            }
            CHECK(std::abs(kl_objective(t, r.model) - dense_objective(t, r.model)) < 1e-8);
            ++checked;
        }
    }
    CHECK(checked == 18);
}

TEST_CASE("trace bookkeeping matches the iteration count") {
    const SparseTensorCOO t = random_count_tensor({4, 3, 3}, 0.5, 99);
    const FitResult r = fit_cpapr(t, 2, {});
    CHECK(r.objective_trace.size() == r.outer_iterations + 1);
    CHECK(r.outer_iterations >= 1);
}

TEST_CASE("factor columns are normalized after fitting") {
    for (std::uint64_t seed : {10u, 20u, 30u}) {
        const SparseTensorCOO t = random_count_tensor({5, 4, 3}, 0.4, seed);
        FitOptions opt;
        opt.seed = seed;
        const FitResult r = fit_cpapr(t, 3, opt);
        for (const auto& f : r.model.factors)
            for (Eigen::Index j = 0; j < f.cols(); ++j)
                CHECK(f.col(j).sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.model.gamma.minCoeff() >= 0.0);
        // Total reconstructed mass equals the gamma total.
        double total = 0.0;
        for_each_cell(t.shape(), [&](const std::vector<std::size_t>& idx) {
            total += r.model.lambda_at(idx);
        });
        CHECK(total == doctest::Approx(r.model.gamma_sum()).epsilon(1e-9));
    }
}

TEST_CASE("same seed reproduces the fit bit for bit") {
    const SparseTensorCOO t = random_count_tensor({5, 4, 3}, 0.4, 7);
    FitOptions opt;
    opt.seed = 11;
    const FitResult a = fit_cpapr(t, 2, opt);
    const FitResult b = fit_cpapr(t, 2, opt);
    CHECK(factors_identical(a.model, b.model));
    CHECK(a.objective_trace == b.objective_trace);

    opt.seed = 12;
    const FitResult c = fit_cpapr(t, 2, opt);
    CHECK(!factors_identical(a.model, c.model));
}

TEST_CASE("fit rejects bad inputs") {
    SparseTensorCOO empty({2, 2});
    empty.finalize();
    CHECK_THROWS_AS(fit_cpapr(empty, 1, {}), Error);

    const SparseTensorCOO t = constant_tensor({2, 2}, 1.0);
    CHECK_THROWS_AS(fit_cpapr(t, 0, {}), Error);
    FitOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(fit_cpapr(t, 1, bad), Error);
}

TEST_CASE("sparse objective agrees with a tiny hand computation") {
    SparseTensorCOO t({2, 2});
    t.add({0, 0}, 2.0);
    t.finalize();
    KruskalModel m;
    m.shape = {2, 2};
    m.gamma = Eigen::VectorXd::Constant(1, 4.0);
    m.factors = {Eigen::MatrixXd(2, 1), Eigen::MatrixXd(2, 1)};
    m.factors[0] << 1.0, 0.0;
    m.factors[1] << 1.0, 0.0;
    // f = sum(gamma) - 2 * log(lambda(0,0)) = 4 - 2 log 4.
    CHECK(kl_objective(t, m) == doctest::Approx(4.0 - 2.0 * std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("fusing blends rates with the fixed weights") {
    SUBCASE("0.1 of the rank-1 rate plus 0.9 of the rank-R rate") {
        const KruskalModel one = uniform_rank1_2x2x2(2.0);
        const KruskalModel big = uniform_rank1_2x2x2(1.0);
        const SmoothedModel s = fuse(one, big);
        CHECK(s.lambda_at({0, 0, 0}) == doctest::Approx(1.1).epsilon(1e-14));
        CHECK(s.lambda_at({1, 1, 1}) == doctest::Approx(1.1).epsilon(1e-14));
    }
    SUBCASE("rank-1 floor keeps dead cells positive") {
        const KruskalModel one = uniform_rank1_2x2x2(0.4);
        KruskalModel dead = uniform_rank1_2x2x2(1.0);
        dead.factors[0](0, 0) = 0.0; // kills every rate in slice i = 0
        dead.factors[0](1, 0) = 1.0;
        const SmoothedModel s = fuse(one, dead);
        CHECK(s.lambda_at({0, 0, 0}) == doctest::Approx(0.04).epsilon(1e-14));
        CHECK(s.lambda_at({0, 1, 1}) == doctest::Approx(0.04).epsilon(1e-14));
        // Every cell stays strictly positive.
        for_each_cell(s.shape(), [&](const std::vector<std::size_t>& idx) {
            CHECK(s.lambda_at(idx) > 0.0);
        });
    }
    SUBCASE("invalid blends are rejected") {
        const KruskalModel one = uniform_rank1_2x2x2(1.0);
        const KruskalModel big = uniform_rank1_2x2x2(1.0);
        CHECK_THROWS_AS(fuse(one, big, 1.0, 0.0), Error);
        CHECK_THROWS_AS(fuse(one, big, 0.3, 0.8), Error);

        KruskalModel other_shape = one;
        other_shape.shape = {2, 2, 3};
        CHECK_THROWS_AS(fuse(one, other_shape), Error);

        KruskalModel zeroed = one;
        zeroed.factors[1](0, 0) = 0.0;
        CHECK_THROWS_AS(fuse(zeroed, big), Error);

        KruskalModel not_rank1;
        not_rank1.shape = {2, 2, 2};
        not_rank1.gamma = Eigen::VectorXd::Ones(2);
        not_rank1.factors.assign(3, Eigen::MatrixXd::Constant(2, 2, 0.5));
        CHECK_THROWS_AS(fuse(not_rank1, big), Error);
    }
}

TEST_CASE("fitting a fused pair end to end keeps every rate positive") {
    const SparseTensorCOO t = random_count_tensor({4, 4, 4}, 0.3, 42);
    FitOptions opt;
    opt.seed = 5;
    const KruskalModel one = fit_cpapr(t, 1, opt).model;
    const KruskalModel big = fit_cpapr(t, 4, opt).model;
    const SmoothedModel s = fuse(one, big);
    for_each_cell(t.shape(), [&](const std::vector<std::size_t>& idx) {
        const double lam = s.lambda_at(idx);
        CHECK(lam > 0.0);
        CHECK(std::isfinite(lam));
    });
}
