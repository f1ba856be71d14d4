#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/poisson.hpp"

using scadatd::Error;
using scadatd::ErrorCode;
using scadatd::gamma_p;
using scadatd::poisson_tail;

namespace {

// Independent tail oracle: sum pmf terms upward from k = x in extended
// precision, seeding from the log form so small tails keep relative accuracy.
long double tail_by_summation(long long x, double lambda) {
    if (x <= 0) return 1.0L;
    const long double lam = lambda;
    const long double log_seed =
        -lam + static_cast<long double>(x) * std::log(lam) - std::lgamma(static_cast<long double>(x) + 1.0L);
    long double term = std::exp(log_seed);
    long double total = 0.0L;
    for (long long k = x; k < x + 4000; ++k) {
        total += term;
        if (term < total * 1e-25L) break;
        term *= lam / static_cast<long double>(k + 1);
    }
    return total;
}

// Lower CDF P(X <= x) by plain forward summation from k = 0.
long double cdf_by_summation(long long x, double lambda) {
    const long double lam = lambda;
    long double term = std::exp(-lam);
    long double total = 0.0L;
    for (long long k = 0; k <= x; ++k) {
        total += term;
        term *= lam / static_cast<long double>(k + 1);
    }
    return total;
}

bool close_abs_or_rel(double got, long double want, double abs_tol, double rel_tol) {
    const long double diff = std::abs(static_cast<long double>(got) - want);
    if (diff <= abs_tol) return true;
    return diff <= rel_tol * std::abs(want);
}

} // namespace

TEST_CASE("tail at x = 0 is exactly 1") {
    CHECK(poisson_tail(0, 0.001) == 1.0);
    CHECK(poisson_tail(0, 1.0) == 1.0);
    CHECK(poisson_tail(0, 500.0) == 1.0);
}

TEST_CASE("closed-form spot values") {
    CHECK(poisson_tail(2, 1.0) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
    CHECK(poisson_tail(1, 0.5) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));
    CHECK(poisson_tail(1, 5.0) == doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-12));
    // P(X >= 1) = 1 - P(X = 0) for any rate.
    for (double lam : {0.01, 0.1, 2.0, 30.0})
        CHECK(std::abs(poisson_tail(1, lam) - (1.0 - std::exp(-lam))) < 1e-14);
}

TEST_CASE("matches the summation oracle on a dense grid") {
    for (double lam : {0.1, 1.0, 10.0}) {
        for (long long x = 0; x <= 50; ++x) {
            const long double want = tail_by_summation(x, lam);
            const double got = poisson_tail(x, lam);
            INFO("lambda=", lam, " x=", x, " got=", got, " want=", static_cast<double>(want));
            CHECK(close_abs_or_rel(got, want, 1e-12, 1e-10));
        }
    }
}

TEST_CASE("tail plus lower CDF is one") {
    for (double lam : {0.1, 1.0, 10.0}) {
        for (long long x = 1; x <= 50; ++x) {
            const long double total =
                static_cast<long double>(poisson_tail(x, lam)) + cdf_by_summation(x - 1, lam);
            INFO("lambda=", lam, " x=", x);
            CHECK(std::abs(static_cast<double>(total - 1.0L)) < 1e-10);
        }
    }
}

TEST_CASE("monotone in both arguments") {
    // Decreasing in x at fixed rate.
    double prev = poisson_tail(0, 3.0);
    for (long long x = 1; x <= 20; ++x) {
        const double cur = poisson_tail(x, 3.0);
        CHECK(cur < prev);
        prev = cur;
    }
    // Increasing in rate at fixed x = 1.
    prev = 0.0;
    for (double lam : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        const double cur = poisson_tail(1, lam);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("results stay inside [0, 1]") {
    for (double lam : {1e-6, 0.3, 7.0, 90.0}) {
        for (long long x : {0LL, 1LL, 3LL, 40LL, 400LL}) {
            const double p = poisson_tail(x, lam);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(poisson_tail(-1, 1.0), Error);
    CHECK_THROWS_AS(poisson_tail(1, 0.0), Error);
    CHECK_THROWS_AS(poisson_tail(1, -2.0), Error);
    CHECK_THROWS_AS(poisson_tail(1, std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(poisson_tail(1, std::numeric_limits<double>::infinity()), Error);
    try {
        poisson_tail(1, 0.0);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_argument);
    }
}

TEST_CASE("regularized incomplete gamma spot identities") {
    // P(1, z) = 1 - exp(-z).
    for (double z : {0.1, 1.0, 4.0})
        CHECK(gamma_p(1.0, z) == doctest::Approx(1.0 - std::exp(-z)).epsilon(1e-13));
    // P(1/2, z) = erf(sqrt(z)).
    for (double z : {0.25, 1.0, 9.0})
        CHECK(gamma_p(0.5, z) == doctest::Approx(std::erf(std::sqrt(z))).epsilon(1e-12));
}
