#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpapr.hpp"
#include "ingest.hpp"
#include "message.hpp"

namespace scadatd {

// One scored message. OOV messages carry p = 0 and no rate; every
// in-vocabulary message gets the fused rate at its encoded cell and the
// Poisson tail probability of seeing at least one occurrence there.
struct ScoredMessage {
    std::size_t row_id = 0; // input-order index
    MessageRecord record;
    std::optional<std::vector<std::size_t>> index;
    bool oov = false;
    std::optional<double> lambda;
    double p_value = 0.0;
};

struct ScoreBatch {
    std::vector<ScoredMessage> scored; // input order; skipped records absent
    SkipReport skips;
};

// Scores one record. gap is the record's inter-arrival time, required only
// by time-bearing layouts; OOV wins over a missing gap, so an unseen token
// is scored p = 0 even when no gap exists.
ScoredMessage score_message(const SmoothedModel& model, const Codebook& codebook,
                            const MessageRecord& record, std::optional<std::int64_t> gap,
                            std::size_t row_id = 0);

// Scores a stream in input order. First-occurrence records under a
// time-bearing layout cannot be placed and are skipped (counted, not scored).
ScoreBatch score_batch(const SmoothedModel& model, const Codebook& codebook,
                       const MessageStream& records);

// Score CSV: row_id,timestamp_ms,rtu_id,points_requested,channel,oov,p_value
// [,label][,model]. label appears when any scored record is labeled; the
// model column appears when model_tag is non-empty (baseline outputs).
void write_scores_csv(const ScoreBatch& batch, std::ostream& out, const std::string& model_tag = "");
void save_scores_csv(const ScoreBatch& batch, const std::string& path, const std::string& model_tag = "");

// Reads a score CSV back (for evaluation of persisted scores). lambda is not
// part of the CSV, so round-tripped messages carry none.
ScoreBatch read_scores_csv(std::istream& in);
ScoreBatch load_scores_csv(const std::string& path);

} // namespace scadatd
