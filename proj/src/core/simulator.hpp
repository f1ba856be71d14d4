#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "message.hpp"

namespace scadatd {

// Empirical description of a polled system: which (rtu, points, channel)
// triples occur and how often, the per-dimension vocabularies, and each
// RTU's observed inter-arrival gaps.
struct SystemProfile {
    struct TripleCount {
        std::string rtu;
        int points = 0;
        std::string channel;
        std::size_t count = 0;

        bool operator==(const TripleCount&) const = default;
    };

    std::vector<TripleCount> triples;        // sorted by (rtu, points, channel)
    std::vector<std::string> rtus;           // sorted unique
    std::vector<int> points_values;          // sorted unique
    std::vector<std::string> channels;       // sorted unique
    std::map<std::string, std::vector<std::int64_t>> gaps_by_rtu; // sorted samples
    std::vector<std::int64_t> all_gaps;      // pooled fallback, sorted

    bool has_triple(const std::string& rtu, int points, const std::string& channel) const;
    bool has_pair(const std::string& rtu, const std::string& channel) const;
    std::size_t message_count() const;

    // Observed (rtu, channel) pairs, sorted, deduplicated.
    std::vector<std::pair<std::string, std::string>> observed_pairs() const;

    bool operator==(const SystemProfile&) const = default;
};

SystemProfile learn_profile(const MessageStream& records);

// Synthesizes benign traffic: triples drawn by empirical frequency, each
// RTU's clock advanced by gaps drawn from its own pool (or the global pool
// when it has none). Output is timestamp-sorted and labeled benign.
MessageStream generate_benign(const SystemProfile& profile, std::size_t n, std::uint64_t seed,
                              std::int64_t start_ts = 0);

enum class Scenario {
    blackbox, // fields from protocol ranges, channel from the observed set
    greybox1, // fields from observed sets, combination out of profile
    greybox2, // valid (rtu, channel) pair, points from observed set, combination out of profile
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct ScenarioConfig {
    Scenario scenario = Scenario::blackbox;
    std::size_t benign_count = 0;
    std::size_t anomaly_count = 0;
    int rtu_lo = 0;
    int rtu_hi = 255; // protocol address range, inclusive
    int points_lo = 1;
    int points_hi = 64; // protocol points range, inclusive
    std::uint64_t seed = 0;
};

// Adds exactly anomaly_count labeled-anomalous messages at timestamps
// uniform over the benign stream's span. Every injected triple is absent
// from the profile (draws are repeated until that holds), so labels are
// clean by construction.
MessageStream inject_anomalies(MessageStream benign, const SystemProfile& profile,
                               const ScenarioConfig& config);

// generate_benign + inject_anomalies from one seed.
MessageStream simulate_scenario(const SystemProfile& profile, const ScenarioConfig& config,
                                std::int64_t start_ts = 0);

} // namespace scadatd
