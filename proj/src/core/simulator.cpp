#include "simulator.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "error.hpp"
#include "ingest.hpp"
#include "rng.hpp"

namespace scadatd {

namespace {

constexpr std::size_t kMaxDrawAttempts = 100000;

std::optional<int> rtu_token_number(const std::string& token) {
    if (token.rfind("RTU_", 0) != 0) return std::nullopt;
    int n = 0;
    const char* begin = token.data() + 4;
    const char* end = token.data() + token.size();
    auto [p, ec] = std::from_chars(begin, end, n);
    if (ec != std::errc{} || p != end) return std::nullopt;
    return n;
}

void validate_config(const SystemProfile& profile, const ScenarioConfig& c) {
    if (c.anomaly_count < 1) raise(ErrorCode::invalid_argument, "simulate: anomaly count must be at least 1");
    if (c.benign_count < 1)
        raise(ErrorCode::invalid_argument,
              "simulate: benign count must be at least 1 (anomalies must stay a strict subset of the stream)");
    if (c.rtu_lo > c.rtu_hi) raise(ErrorCode::invalid_argument, "simulate: empty rtu address range");
    if (c.points_lo > c.points_hi || c.points_lo < 1)
        raise(ErrorCode::invalid_argument, "simulate: points range must be non-empty and start at 1 or above");

    // The protocol ranges must cover everything the system was observed to
    // use; otherwise the black-box draw space would exclude valid values.
    for (int p : profile.points_values)
        if (p < c.points_lo || p > c.points_hi)
            raise(ErrorCode::invalid_argument, "simulate: observed points value " + std::to_string(p) +
                                                   " lies outside the protocol points range");
    for (const auto& r : profile.rtus) {
        auto n = rtu_token_number(r);
        if (n && (*n < c.rtu_lo || *n > c.rtu_hi))
            raise(ErrorCode::invalid_argument, "simulate: observed rtu '" + r +
                                                   "' lies outside the protocol address range");
    }
}

MessageRecord draw_anomaly(const SystemProfile& profile, const ScenarioConfig& config, Rng& rng) {
    const auto pairs = profile.observed_pairs();
    for (std::size_t attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
        MessageRecord r;
        switch (config.scenario) {
            case Scenario::blackbox:
                r.rtu_id = "RTU_" + std::to_string(rng.next_int(config.rtu_lo, config.rtu_hi));
                r.points_requested = static_cast<int>(rng.next_int(config.points_lo, config.points_hi));
                r.channel = profile.channels[rng.next_index(profile.channels.size())];
                break;
            case Scenario::greybox1:
                r.rtu_id = profile.rtus[rng.next_index(profile.rtus.size())];
                r.points_requested = profile.points_values[rng.next_index(profile.points_values.size())];
                r.channel = profile.channels[rng.next_index(profile.channels.size())];
                break;
            case Scenario::greybox2: {
                const auto& pair = pairs[rng.next_index(pairs.size())];
                r.rtu_id = pair.first;
                r.channel = pair.second;
                r.points_requested = profile.points_values[rng.next_index(profile.points_values.size())];
                break;
            }
        }
        if (!profile.has_triple(r.rtu_id, r.points_requested, r.channel)) {
            r.label = Label::anomalous;
            return r;
        }
    }
    raise(ErrorCode::data, "simulate: could not draw an out-of-profile " + scenario_name(config.scenario) +
                               " message; the observed value sets admit no such combination");
}

MessageStream generate_benign_with(const SystemProfile& profile, std::size_t n, Rng& rng,
                                   std::int64_t start_ts) {
    if (profile.triples.empty()) raise(ErrorCode::data, "simulate: profile has no triples");
    if (profile.all_gaps.empty()) raise(ErrorCode::data, "simulate: profile has no inter-arrival samples");

    std::vector<double> weights;
    weights.reserve(profile.triples.size());
    for (const auto& t : profile.triples) weights.push_back(static_cast<double>(t.count));

    MessageStream out;
    out.reserve(n);
    std::map<std::string, std::int64_t> clock;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& triple = profile.triples[rng.next_weighted(weights)];
        auto pool_it = profile.gaps_by_rtu.find(triple.rtu);
        const std::vector<std::int64_t>& pool =
            (pool_it != profile.gaps_by_rtu.end() && !pool_it->second.empty()) ? pool_it->second
                                                                               : profile.all_gaps;
        const std::int64_t gap = pool[rng.next_index(pool.size())];
        auto [it, inserted] = clock.try_emplace(triple.rtu, start_ts);
        it->second += gap;

        MessageRecord r;
        r.timestamp_ms = it->second;
        r.rtu_id = triple.rtu;
        r.points_requested = triple.points;
        r.channel = triple.channel;
        r.label = Label::benign;
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const MessageRecord& a, const MessageRecord& b) {
        return a.timestamp_ms < b.timestamp_ms;
    });
    return out;
}

MessageStream inject_with(MessageStream benign, const SystemProfile& profile,
                          const ScenarioConfig& config, Rng& rng) {
    validate_config(profile, config);
    if (benign.empty()) raise(ErrorCode::invalid_argument, "simulate: cannot inject into an empty stream");
    if (profile.channels.empty()) raise(ErrorCode::data, "simulate: profile has no channels");

    auto [min_it, max_it] = std::minmax_element(
        benign.begin(), benign.end(),
        [](const MessageRecord& a, const MessageRecord& b) { return a.timestamp_ms < b.timestamp_ms; });
    const std::int64_t lo = min_it->timestamp_ms;
    const std::int64_t hi = max_it->timestamp_ms;

    for (std::size_t i = 0; i < config.anomaly_count; ++i) {
        MessageRecord r = draw_anomaly(profile, config, rng);
        r.timestamp_ms = rng.next_int(lo, hi);
        benign.push_back(std::move(r));
    }
    std::stable_sort(benign.begin(), benign.end(), [](const MessageRecord& a, const MessageRecord& b) {
        return a.timestamp_ms < b.timestamp_ms;
    });
    return benign;
}

} // namespace

bool SystemProfile::has_triple(const std::string& rtu, int points, const std::string& channel) const {
    TripleCount probe{rtu, points, channel, 0};
    auto cmp = [](const TripleCount& a, const TripleCount& b) {
        return std::tie(a.rtu, a.points, a.channel) < std::tie(b.rtu, b.points, b.channel);
    };
    auto it = std::lower_bound(triples.begin(), triples.end(), probe, cmp);
    return it != triples.end() && it->rtu == rtu && it->points == points && it->channel == channel;
}

bool SystemProfile::has_pair(const std::string& rtu, const std::string& channel) const {
    for (const auto& t : triples)
        if (t.rtu == rtu && t.channel == channel) return true;
    return false;
}

std::size_t SystemProfile::message_count() const {
    std::size_t n = 0;
    for (const auto& t : triples) n += t.count;
    return n;
}

std::vector<std::pair<std::string, std::string>> SystemProfile::observed_pairs() const {
    std::set<std::pair<std::string, std::string>> set;
    for (const auto& t : triples) set.emplace(t.rtu, t.channel);
    return {set.begin(), set.end()};
}

SystemProfile learn_profile(const MessageStream& records) {
    if (records.empty()) raise(ErrorCode::data, "profile: empty message stream");

    SystemProfile profile;
    std::map<std::tuple<std::string, int, std::string>, std::size_t> counts;
    std::set<std::string> rtus, channels;
    std::set<int> points;
    for (const auto& r : records) {
        counts[{r.rtu_id, r.points_requested, r.channel}] += 1;
        rtus.insert(r.rtu_id);
        channels.insert(r.channel);
        points.insert(r.points_requested);
    }
    for (const auto& [key, count] : counts)
        profile.triples.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    profile.rtus.assign(rtus.begin(), rtus.end());
    profile.channels.assign(channels.begin(), channels.end());
    profile.points_values.assign(points.begin(), points.end());

    DeltaTimes dt = compute_delta_times(records);
    for (std::size_t i = 0; i < dt.sorted.size(); ++i) {
        if (!dt.gaps[i]) continue;
        const std::int64_t gap = *dt.gaps[i];
        if (gap <= 0) continue; // zero gaps would freeze a generated clock
        profile.gaps_by_rtu[dt.sorted[i].rtu_id].push_back(gap);
        profile.all_gaps.push_back(gap);
    }
    for (auto& [rtu, pool] : profile.gaps_by_rtu) std::sort(pool.begin(), pool.end());
    std::sort(profile.all_gaps.begin(), profile.all_gaps.end());
    if (profile.all_gaps.empty())
        raise(ErrorCode::data, "profile: no positive inter-arrival gaps observed");
    return profile;
}

MessageStream generate_benign(const SystemProfile& profile, std::size_t n, std::uint64_t seed,
                              std::int64_t start_ts) {
    Rng rng(seed);
    return generate_benign_with(profile, n, rng, start_ts);
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::blackbox: return "blackbox";
        case Scenario::greybox1: return "greybox1";
        case Scenario::greybox2: return "greybox2";
    }
    raise(ErrorCode::invalid_argument, "unknown scenario");
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "blackbox") return Scenario::blackbox;
    if (name == "greybox1") return Scenario::greybox1;
    if (name == "greybox2") return Scenario::greybox2;
    raise(ErrorCode::invalid_argument,
          "unknown scenario '" + name + "' (want blackbox, greybox1, or greybox2)");
}

MessageStream inject_anomalies(MessageStream benign, const SystemProfile& profile,
                               const ScenarioConfig& config) {
    Rng rng(config.seed);
    return inject_with(std::move(benign), profile, config, rng);
}

MessageStream simulate_scenario(const SystemProfile& profile, const ScenarioConfig& config,
                                std::int64_t start_ts) {
    validate_config(profile, config);
    Rng rng(config.seed);
    MessageStream benign = generate_benign_with(profile, config.benign_count, rng, start_ts);
    return inject_with(std::move(benign), profile, config, rng);
}

} // namespace scadatd
