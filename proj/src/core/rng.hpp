#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "error.hpp"

namespace scadatd {

// Seeded generator with fully specified draw semantics, so that artifacts are
// byte-identical across platforms and standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of randomness.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], inclusive. Rejection-free Lemire reduction
    // would bias slightly for huge ranges; ranges here are tiny, so use
    // rejection sampling on the top bits for exact uniformity.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) raise(ErrorCode::invalid_argument, "rng: empty integer range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_()); // full 64-bit range
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % span);
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return lo + static_cast<std::int64_t>(draw % span);
    }

    std::size_t next_index(std::size_t n) {
        if (n == 0) raise(ErrorCode::invalid_argument, "rng: empty choice set");
        return static_cast<std::size_t>(next_int(0, static_cast<std::int64_t>(n) - 1));
    }

    // Index draw from unnormalized weights.
    std::size_t next_weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) raise(ErrorCode::invalid_argument, "rng: weights sum to zero");
        double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace scadatd
