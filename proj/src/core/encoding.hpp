#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scadatd {

// Maps categorical tokens to dense indices. Index order is the sorted token
// order: numeric when every token is a plain digit string, lexicographic
// otherwise. Tokens absent from the training vocabulary never get an index;
// lookups report them as out-of-vocabulary instead.
class DimensionEncoder {
public:
    DimensionEncoder() = default;
    static DimensionEncoder from_tokens(const std::vector<std::string>& tokens);

    std::optional<std::size_t> index_of(const std::string& token) const;
    const std::string& token_at(std::size_t index) const;
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    bool operator==(const DimensionEncoder& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::map<std::string, std::size_t> index_;
};

// Equal-frequency binning of inter-arrival gaps. Interior edges are sample
// quantiles of the training gaps; duplicate and degenerate edges collapse, so
// the realized bin count can fall below the target when the data ties.
class TimeBinning {
public:
    TimeBinning() = default;

    // Builds edges from training gaps (milliseconds). target_bins >= 1.
    static TimeBinning fit(std::vector<std::int64_t> gaps, std::size_t target_bins);

    // Restores a binning from previously fitted edges.
    static TimeBinning from_edges(std::vector<std::int64_t> edges, std::size_t bin_count);

    std::size_t bin_count() const { return bin_count_; }
    const std::vector<std::int64_t>& edges() const { return edges_; }

    // Bin index in [0, bin_count): the number of interior edges <= gap.
    std::size_t bin_of(std::int64_t gap) const;

    bool operator==(const TimeBinning& other) const = default;

private:
    std::vector<std::int64_t> edges_; // strictly increasing interior edges
    std::size_t bin_count_ = 1;
};

} // namespace scadatd
