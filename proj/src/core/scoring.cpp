#include "scoring.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"
#include "poisson.hpp"

namespace scadatd {

ScoredMessage score_message(const SmoothedModel& model, const Codebook& codebook,
                            const MessageRecord& record, std::optional<std::int64_t> gap,
                            std::size_t row_id) {
    ScoredMessage s;
    s.row_id = row_id;
    s.record = record;
    if (codebook.is_oov(record)) {
        s.oov = true;
        s.p_value = 0.0;
        return s;
    }
    auto index = codebook.encode(record, gap);
    if (!index) raise(ErrorCode::data, "score: record passed the vocabulary check but failed to encode");
    const double rate = model.lambda_at(*index);
    s.index = std::move(index);
    s.lambda = rate;
    s.p_value = poisson_tail(1, rate);
    return s;
}

ScoreBatch score_batch(const SmoothedModel& model, const Codebook& codebook,
                       const MessageStream& records) {
    ScoreBatch batch;
    batch.scored.reserve(records.size());
    const bool timed = schema_has_time(codebook.schema);
    std::vector<std::optional<std::int64_t>> gaps;
    if (timed) gaps = input_order_gaps(records);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const MessageRecord& r = records[i];
        // OOV wins over a missing gap: an unseen token is scored p = 0 even
        // when the record is its RTU's first occurrence.
        if (codebook.is_oov(r)) {
            batch.scored.push_back(score_message(model, codebook, r, std::nullopt, i));
            continue;
        }
        std::optional<std::int64_t> gap;
        if (timed) {
            gap = gaps[i];
            if (!gap) {
                batch.skips.first_occurrence += 1;
                continue;
            }
        }
        batch.scored.push_back(score_message(model, codebook, r, gap, i));
    }
    return batch;
}

void write_scores_csv(const ScoreBatch& batch, std::ostream& out, const std::string& model_tag) {
    bool labeled = false;
    for (const auto& s : batch.scored)
        if (s.record.label) { labeled = true; break; }
    out << "row_id,timestamp_ms,rtu_id,points_requested,channel,oov,p_value";
    if (labeled) out << ",label";
    if (!model_tag.empty()) out << ",model";
    out << '\n';
    for (const auto& s : batch.scored) {
        out << s.row_id << ',' << s.record.timestamp_ms << ',' << s.record.rtu_id << ','
            << s.record.points_requested << ',' << s.record.channel << ',' << (s.oov ? 1 : 0)
            << ',' << format_double(s.p_value);
        if (labeled) {
            out << ',';
            if (s.record.label)
                out << (*s.record.label == Label::anomalous ? "anomalous" : "benign");
        }
        if (!model_tag.empty()) out << ',' << model_tag;
        out << '\n';
    }
}

void save_scores_csv(const ScoreBatch& batch, const std::string& path, const std::string& model_tag) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::io, "scores: cannot open for writing: " + path);
    write_scores_csv(batch, out, model_tag);
    if (!out) raise(ErrorCode::io, "scores: write failed: " + path);
}

ScoreBatch read_scores_csv(std::istream& in) {
    ScoreBatch batch;
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::data, "scores: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) header.push_back(tok);
    }
    const std::vector<std::string> base{"row_id", "timestamp_ms", "rtu_id", "points_requested",
                                        "channel", "oov", "p_value"};
    if (header.size() < base.size() ||
        !std::equal(base.begin(), base.end(), header.begin()))
        raise(ErrorCode::data, "scores: unrecognized header");
    int label_col = -1, model_col = -1;
    for (std::size_t c = base.size(); c < header.size(); ++c) {
        if (header[c] == "label") label_col = static_cast<int>(c);
        else if (header[c] == "model") model_col = static_cast<int>(c);
        else raise(ErrorCode::data, "scores: unknown column '" + header[c] + "'");
    }
    (void)model_col;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != header.size())
            raise(ErrorCode::data, "scores: line " + std::to_string(lineno) + " has " +
                                       std::to_string(f.size()) + " fields, expected " +
                                       std::to_string(header.size()));
        ScoredMessage s;
        try {
            s.row_id = std::stoull(f[0]);
            s.record.timestamp_ms = std::stoll(f[1]);
            s.record.rtu_id = f[2];
            s.record.points_requested = std::stoi(f[3]);
            s.record.channel = f[4];
            s.oov = (f[5] == "1");
            s.p_value = std::stod(f[6]);
        } catch (const std::exception&) {
            raise(ErrorCode::data, "scores: malformed row on line " + std::to_string(lineno));
        }
        if (label_col >= 0 && !f[static_cast<std::size_t>(label_col)].empty()) {
            const std::string& lab = f[static_cast<std::size_t>(label_col)];
            if (lab == "anomalous") s.record.label = Label::anomalous;
            else if (lab == "benign") s.record.label = Label::benign;
            else raise(ErrorCode::data, "scores: bad label on line " + std::to_string(lineno));
        }
        batch.scored.push_back(std::move(s));
    }
    return batch;
}

ScoreBatch load_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "scores: cannot open: " + path);
    return read_scores_csv(in);
}

} // namespace scadatd
