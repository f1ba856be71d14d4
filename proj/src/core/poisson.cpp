#include "poisson.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace scadatd {

namespace {

// Series expansion of P(a, z), converges quickly for z < a + 1.
double gamma_p_series(double a, double z) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= z / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

// Continued fraction for Q(a, z) = 1 - P(a, z), converges for z >= a + 1.
// Modified Lentz evaluation.
double gamma_q_contfrac(double a, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double z) {
    if (!(a > 0.0)) raise(ErrorCode::invalid_argument, "gamma_p: a must be positive");
    if (z < 0.0) raise(ErrorCode::invalid_argument, "gamma_p: z must be non-negative");
    if (z == 0.0) return 0.0;
    if (z < a + 1.0) return gamma_p_series(a, z);
    return 1.0 - gamma_q_contfrac(a, z);
}

double poisson_tail(std::int64_t x, double lambda) {
    if (x < 0) raise(ErrorCode::invalid_argument, "poisson_tail: count must be non-negative");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        raise(ErrorCode::invalid_argument, "poisson_tail: rate must be finite and positive");
    if (x == 0) return 1.0;
    return gamma_p(static_cast<double>(x), lambda);
}

} // namespace scadatd
