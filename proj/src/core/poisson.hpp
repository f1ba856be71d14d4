#pragma once

#include <cstdint>

namespace scadatd {

// Upper tail probability P(X >= x) for X ~ Poisson(lambda), lambda > 0.
//
// For x >= 1 this equals the regularized lower incomplete gamma function
// P(x, lambda); for x == 0 it is identically 1. Accurate to ~1e-14 relative
// over the ranges that matter here (lambda in (0, ~1e6), x up to ~1e6).
double poisson_tail(std::int64_t x, double lambda);

// Regularized lower incomplete gamma P(a, z) = gamma(a, z) / Gamma(a), a > 0.
double gamma_p(double a, double z);

} // namespace scadatd
