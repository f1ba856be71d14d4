#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scadatd {

enum class Label : std::uint8_t {
    benign = 0,
    anomalous = 1,
};

// One polled SCADA request as it appears on the wire: when it was sent, which
// remote unit it addressed, how many points it asked for, and on which
// channel. Labels exist only for simulated or annotated streams.
struct MessageRecord {
    std::int64_t timestamp_ms = 0;
    std::string rtu_id;
    int points_requested = 0;
    std::string channel;
    std::optional<Label> label;
};

using MessageStream = std::vector<MessageRecord>;

} // namespace scadatd
