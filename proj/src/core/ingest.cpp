#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace scadatd {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::int64_t parse_i64(const std::string& s, const char* what, std::size_t lineno) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        raise(ErrorCode::data, std::string("line ") + std::to_string(lineno) + ": malformed " + what + " '" + s + "'");
    return v;
}

std::optional<Label> parse_label(const std::string& s, std::size_t lineno) {
    if (s.empty()) return std::nullopt;
    if (s == "benign") return Label::benign;
    if (s == "anomalous") return Label::anomalous;
    raise(ErrorCode::data, "line " + std::to_string(lineno) + ": label must be benign or anomalous, got '" + s + "'");
}

void validate(MessageRecord& r, std::size_t lineno) {
    if (r.timestamp_ms < 0)
        raise(ErrorCode::data, "line " + std::to_string(lineno) + ": timestamp_ms must be non-negative");
    if (r.points_requested < 1)
        raise(ErrorCode::data, "line " + std::to_string(lineno) + ": points_requested must be at least 1");
    if (r.rtu_id.empty())
        raise(ErrorCode::data, "line " + std::to_string(lineno) + ": rtu_id is empty");
    if (r.channel.empty())
        raise(ErrorCode::data, "line " + std::to_string(lineno) + ": channel is empty");
}

} // namespace

MessageStream read_messages_csv(std::istream& in) {
    MessageStream out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("timestamp_ms", 0) == 0) continue; // header row
        auto fields = split_csv(line);
        if (fields.size() != 4 && fields.size() != 5)
            raise(ErrorCode::data, "line " + std::to_string(lineno) + ": expected 4 or 5 fields, got " +
                                       std::to_string(fields.size()));
        MessageRecord r;
        r.timestamp_ms = parse_i64(fields[0], "timestamp_ms", lineno);
        r.rtu_id = fields[1];
        r.points_requested = static_cast<int>(parse_i64(fields[2], "points_requested", lineno));
        r.channel = fields[3];
        if (fields.size() == 5) r.label = parse_label(fields[4], lineno);
        validate(r, lineno);
        out.push_back(std::move(r));
    }
    return out;
}

MessageStream read_messages_jsonl(std::istream& in) {
    MessageStream out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::data, "line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        for (const char* key : {"timestamp_ms", "rtu_id", "points_requested", "channel"})
            if (!j.contains(key))
                raise(ErrorCode::data, "line " + std::to_string(lineno) + ": missing field '" + key + "'");
        MessageRecord r;
        try {
            r.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
            r.rtu_id = j.at("rtu_id").get<std::string>();
            r.points_requested = j.at("points_requested").get<int>();
            r.channel = j.at("channel").get<std::string>();
            if (j.contains("label") && !j.at("label").is_null())
                r.label = parse_label(j.at("label").get<std::string>(), lineno);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::data, "line " + std::to_string(lineno) + ": wrong field type: " + e.what());
        }
        validate(r, lineno);
        out.push_back(std::move(r));
    }
    return out;
}

MessageStream load_messages(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open message log: " + path);
    auto ends_with = [&](const char* suffix) {
        const std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".csv")) return read_messages_csv(in);
    if (ends_with(".jsonl") || ends_with(".ndjson")) return read_messages_jsonl(in);
    raise(ErrorCode::invalid_argument, "unrecognized message log extension (want .csv, .jsonl, or .ndjson): " + path);
}

void write_messages_csv(const MessageStream& stream, std::ostream& out) {
    bool labeled = false;
    for (const auto& r : stream)
        if (r.label) { labeled = true; break; }
    out << "timestamp_ms,rtu_id,points_requested,channel";
    if (labeled) out << ",label";
    out << '\n';
    for (const auto& r : stream) {
        out << r.timestamp_ms << ',' << r.rtu_id << ',' << r.points_requested << ',' << r.channel;
        if (labeled) {
            out << ',';
            if (r.label) out << (*r.label == Label::anomalous ? "anomalous" : "benign");
        }
        out << '\n';
    }
}

void save_messages_csv(const MessageStream& stream, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::io, "cannot open for writing: " + path);
    write_messages_csv(stream, out);
    if (!out) raise(ErrorCode::io, "write failed: " + path);
}

std::string schema_name(TensorSchema s) {
    switch (s) {
        case TensorSchema::ipt: return "IPT";
        case TensorSchema::ipct: return "IPCT";
        case TensorSchema::ipc: return "IPC";
    }
    raise(ErrorCode::invalid_argument, "unknown tensor schema");
}

TensorSchema schema_from_name(const std::string& name) {
    if (name == "IPT" || name == "ipt") return TensorSchema::ipt;
    if (name == "IPCT" || name == "ipct") return TensorSchema::ipct;
    if (name == "IPC" || name == "ipc") return TensorSchema::ipc;
    raise(ErrorCode::invalid_argument, "unknown tensor schema '" + name + "' (want IPT, IPCT, or IPC)");
}

bool schema_has_time(TensorSchema s) { return s == TensorSchema::ipt || s == TensorSchema::ipct; }
bool schema_has_channel(TensorSchema s) { return s == TensorSchema::ipct || s == TensorSchema::ipc; }
bool schema_is_binary(TensorSchema s) { return s == TensorSchema::ipc; }

DeltaTimes compute_delta_times(const MessageStream& records) {
    DeltaTimes dt;
    dt.original_index.resize(records.size());
    std::iota(dt.original_index.begin(), dt.original_index.end(), 0);
    std::stable_sort(dt.original_index.begin(), dt.original_index.end(), [&](std::size_t a, std::size_t b) {
        return records[a].timestamp_ms < records[b].timestamp_ms;
    });
    dt.sorted.reserve(records.size());
    dt.gaps.reserve(records.size());
    std::map<std::string, std::int64_t> last_seen;
    for (std::size_t pos : dt.original_index) {
        const MessageRecord& r = records[pos];
        auto it = last_seen.find(r.rtu_id);
        if (it == last_seen.end()) {
            dt.gaps.emplace_back(std::nullopt);
        } else {
            dt.gaps.emplace_back(r.timestamp_ms - it->second);
        }
        last_seen[r.rtu_id] = r.timestamp_ms;
        dt.sorted.push_back(r);
    }
    return dt;
}

std::vector<std::optional<std::int64_t>> input_order_gaps(const MessageStream& records) {
    DeltaTimes dt = compute_delta_times(records);
    std::vector<std::optional<std::int64_t>> out(records.size());
    for (std::size_t k = 0; k < dt.original_index.size(); ++k)
        out[dt.original_index[k]] = dt.gaps[k];
    return out;
}

std::vector<std::size_t> Codebook::shape() const {
    std::vector<std::size_t> s{rtu.size(), points.size()};
    if (schema_has_channel(schema)) s.push_back(channel.size());
    if (schema_has_time(schema)) {
        if (!binning) raise(ErrorCode::data, "codebook: time-bearing layout has no binning");
        s.push_back(binning->bin_count());
    }
    return s;
}

bool Codebook::is_oov(const MessageRecord& record) const {
    if (!rtu.index_of(record.rtu_id)) return true;
    if (!points.index_of(std::to_string(record.points_requested))) return true;
    if (schema_has_channel(schema) && !channel.index_of(record.channel)) return true;
    return false;
}

std::optional<std::vector<std::size_t>> Codebook::encode(const MessageRecord& record,
                                                         std::optional<std::int64_t> gap) const {
    auto ri = rtu.index_of(record.rtu_id);
    auto pi = points.index_of(std::to_string(record.points_requested));
    if (!ri || !pi) return std::nullopt;
    std::vector<std::size_t> coord{*ri, *pi};
    if (schema_has_channel(schema)) {
        auto ci = channel.index_of(record.channel);
        if (!ci) return std::nullopt;
        coord.push_back(*ci);
    }
    if (schema_has_time(schema)) {
        if (!binning) raise(ErrorCode::data, "codebook: time-bearing layout has no binning");
        if (!gap) raise(ErrorCode::invalid_argument, "codebook: record without a gap cannot be placed in a time-bearing layout");
        coord.push_back(binning->bin_of(*gap));
    }
    return coord;
}

namespace {

TensorBuild accumulate(const MessageStream& records, Codebook codebook, bool learned_here) {
    TensorBuild build;
    build.codebook = std::move(codebook);
    const Codebook& cb = build.codebook;

    const bool timed = schema_has_time(cb.schema);
    std::vector<std::optional<std::int64_t>> gaps;
    if (timed) gaps = input_order_gaps(records);

    SparseTensorCOO tensor(cb.shape());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const MessageRecord& r = records[i];
        if (!learned_here && cb.is_oov(r)) {
            build.oov_rows.push_back(i);
            build.skips.oov += 1;
            continue;
        }
        std::optional<std::int64_t> gap;
        if (timed) {
            gap = gaps[i];
            if (!gap) {
                build.skips.first_occurrence += 1;
                continue;
            }
        }
        auto coord = cb.encode(r, gap);
        if (!coord) {
            // A freshly learned codebook covers every training token.
            raise(ErrorCode::data, "build: record " + std::to_string(i) + " has tokens outside the codebook");
        }
        tensor.add(*coord, 1.0);
    }
    tensor.finalize();

    if (schema_is_binary(cb.schema)) {
        tensor.binarize();
        build.inflation_constant = tensor.inflate_binary();
    }
    build.tensor = std::move(tensor);
    return build;
}

} // namespace

TensorBuild build_tensor(const MessageStream& records, TensorSchema schema, std::size_t target_bins) {
    if (records.empty()) raise(ErrorCode::data, "build: empty message stream");

    Codebook cb;
    cb.schema = schema;
    {
        std::vector<std::string> rtu_tokens, points_tokens, channel_tokens;
        rtu_tokens.reserve(records.size());
        points_tokens.reserve(records.size());
        for (const auto& r : records) {
            rtu_tokens.push_back(r.rtu_id);
            points_tokens.push_back(std::to_string(r.points_requested));
            if (schema_has_channel(schema)) channel_tokens.push_back(r.channel);
        }
        cb.rtu = DimensionEncoder::from_tokens(rtu_tokens);
        cb.points = DimensionEncoder::from_tokens(points_tokens);
        if (schema_has_channel(schema)) cb.channel = DimensionEncoder::from_tokens(channel_tokens);
    }
    if (schema_has_time(schema)) {
        std::vector<std::int64_t> observed;
        for (const auto& gap : input_order_gaps(records))
            if (gap) observed.push_back(*gap);
        if (observed.empty())
            raise(ErrorCode::data, "build: no inter-arrival gaps (every record is a first occurrence)");
        cb.binning = TimeBinning::fit(std::move(observed), target_bins);
    }
    return accumulate(records, std::move(cb), /*learned_here=*/true);
}

TensorBuild build_tensor(const MessageStream& records, const Codebook& codebook) {
    if (schema_has_time(codebook.schema) && !codebook.binning)
        raise(ErrorCode::data, "build: codebook for a time-bearing layout is missing its binning");
    if (codebook.rtu.size() == 0 || codebook.points.size() == 0)
        raise(ErrorCode::data, "build: codebook has empty encoders");
    if (schema_has_channel(codebook.schema) && codebook.channel.size() == 0)
        raise(ErrorCode::data, "build: codebook is missing the channel encoder");
    return accumulate(records, codebook, /*learned_here=*/false);
}

} // namespace scadatd
