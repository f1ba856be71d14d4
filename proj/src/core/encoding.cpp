#include "encoding.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "error.hpp"

namespace scadatd {

namespace {

bool all_numeric(const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
        if (t.empty()) return false;
        for (char c : t)
            if (c < '0' || c > '9') return false;
    }
    return !tokens.empty();
}

} // namespace

DimensionEncoder DimensionEncoder::from_tokens(const std::vector<std::string>& tokens) {
    if (tokens.empty()) raise(ErrorCode::data, "encoder: no tokens observed for dimension");
    std::set<std::string> unique(tokens.begin(), tokens.end());
    DimensionEncoder enc;
    enc.tokens_.assign(unique.begin(), unique.end());
    if (all_numeric(enc.tokens_)) {
        std::sort(enc.tokens_.begin(), enc.tokens_.end(), [](const std::string& a, const std::string& b) {
            long long na = 0, nb = 0;
            std::from_chars(a.data(), a.data() + a.size(), na);
            std::from_chars(b.data(), b.data() + b.size(), nb);
            if (na != nb) return na < nb;
            return a < b;
        });
    }
    for (std::size_t i = 0; i < enc.tokens_.size(); ++i) enc.index_[enc.tokens_[i]] = i;
    return enc;
}

std::optional<std::size_t> DimensionEncoder::index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& DimensionEncoder::token_at(std::size_t index) const {
    if (index >= tokens_.size()) raise(ErrorCode::invalid_argument, "encoder: index out of range");
    return tokens_[index];
}

TimeBinning TimeBinning::fit(std::vector<std::int64_t> gaps, std::size_t target_bins) {
    if (target_bins == 0) raise(ErrorCode::invalid_argument, "binning: target bin count must be at least 1");
    if (gaps.empty()) raise(ErrorCode::data, "binning: no gaps to fit");
    std::sort(gaps.begin(), gaps.end());

    TimeBinning b;
    const std::size_t n = gaps.size();
    // Interior edge k sits at the k/target quantile. Edges at or below the
    // smallest sample would create an empty first bin, so they are dropped
    // along with duplicates.
    std::int64_t prev = gaps.front();
    for (std::size_t k = 1; k < target_bins; ++k) {
        const std::size_t pos = (n * k) / target_bins;
        const std::int64_t edge = gaps[pos];
        if (edge > prev) {
            b.edges_.push_back(edge);
            prev = edge;
        }
    }
    b.bin_count_ = b.edges_.size() + 1;
    return b;
}

TimeBinning TimeBinning::from_edges(std::vector<std::int64_t> edges, std::size_t bin_count) {
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i] <= edges[i - 1]) raise(ErrorCode::data, "binning: edges must be strictly increasing");
    if (bin_count != edges.size() + 1) raise(ErrorCode::data, "binning: bin count does not match edges");
    TimeBinning b;
    b.edges_ = std::move(edges);
    b.bin_count_ = bin_count;
    return b;
}

std::size_t TimeBinning::bin_of(std::int64_t gap) const {
    // Bin index is the number of interior edges at or below the gap, which is
    // what upper_bound counts. Fitted edges all exceed the smallest training
    // gap, so bin 0 is never empty on the training data.
    auto it = std::upper_bound(edges_.begin(), edges_.end(), gap);
    return static_cast<std::size_t>(it - edges_.begin());
}

} // namespace scadatd
