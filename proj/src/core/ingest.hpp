#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "encoding.hpp"
#include "message.hpp"
#include "sparse_tensor.hpp"

namespace scadatd {

// Message log readers. CSV columns are
// timestamp_ms,rtu_id,points_requested,channel[,label]; a header row is
// recognized and skipped. JSON lines carry the same keys. Malformed rows
// raise with their line number.
MessageStream read_messages_csv(std::istream& in);
MessageStream read_messages_jsonl(std::istream& in);

// Dispatches on extension: .csv, or .jsonl / .ndjson.
MessageStream load_messages(const std::string& path);

void write_messages_csv(const MessageStream& stream, std::ostream& out);
void save_messages_csv(const MessageStream& stream, const std::string& path);

// Tensor layouts. The layout fixes both the mode list and the value kind:
// time-bearing layouts store occurrence counts, the timeless one stores
// binary occupancy and is then inflated to a mean near 1.
enum class TensorSchema {
    ipt,  // rtu x points x time-bin, counts
    ipct, // rtu x points x channel x time-bin, counts
    ipc,  // rtu x points x channel, inflated binary
};

std::string schema_name(TensorSchema s);
TensorSchema schema_from_name(const std::string& name);
bool schema_has_time(TensorSchema s);
bool schema_has_channel(TensorSchema s);
bool schema_is_binary(TensorSchema s);

// Stream sorted stably by timestamp with, per position, the milliseconds
// since the previous message to the same RTU (none for each RTU's first).
struct DeltaTimes {
    MessageStream sorted;
    std::vector<std::optional<std::int64_t>> gaps;
    std::vector<std::size_t> original_index; // sorted position -> input position
};
DeltaTimes compute_delta_times(const MessageStream& records);

// Same gaps, aligned to the input order instead of the sorted order.
std::vector<std::optional<std::int64_t>> input_order_gaps(const MessageStream& records);

// Records excluded while building or scoring, by reason.
struct SkipReport {
    std::size_t first_occurrence = 0; // no inter-arrival gap to bin
    std::size_t oov = 0;              // unseen categorical value
    std::size_t total() const { return first_occurrence + oov; }
};

// Everything needed to map a message onto tensor coordinates: the layout,
// one encoder per categorical mode, and the time binning when the layout
// has a time mode. Learned at train time, fixed thereafter.
struct Codebook {
    TensorSchema schema = TensorSchema::ipc;
    DimensionEncoder rtu;
    DimensionEncoder points;
    DimensionEncoder channel; // empty when the layout has no channel mode
    std::optional<TimeBinning> binning;

    std::vector<std::size_t> shape() const;

    // Tensor coordinate for one record, or nullopt when a categorical value
    // is out of vocabulary. gap is required for time-bearing layouts.
    std::optional<std::vector<std::size_t>> encode(const MessageRecord& record,
                                                   std::optional<std::int64_t> gap) const;

    // True when some categorical mode of this layout has an unseen token.
    bool is_oov(const MessageRecord& record) const;
};

struct TensorBuild {
    Codebook codebook;
    SparseTensorCOO tensor;
    SkipReport skips;
    std::vector<std::size_t> oov_rows;  // input-order indices; only filled when a codebook was supplied
    long long inflation_constant = 1;   // 1 for count layouts
};

// Training-time build: learns encoders (and binning, for time layouts) from
// the stream, then accumulates the tensor.
TensorBuild build_tensor(const MessageStream& records, TensorSchema schema,
                         std::size_t target_bins = 200);

// Test-time build against a fixed codebook: records with unseen tokens land
// in oov_rows instead of being encoded.
TensorBuild build_tensor(const MessageStream& records, const Codebook& codebook);

} // namespace scadatd
