#pragma once

/// @file messaging.hpp
/// @brief Hub/sensor/HQ wire protocol.
///
/// Every message travels as one line of canonical JSON terminated by `\n`:
/// `{"body":{...},"t":"TEL|CTL|HQ","v":1}`. Keys are emitted in lexicographic
/// order at every level so that framing a value is byte-deterministic. The
/// same lines form the persisted event log.

#include "gnsm/core_types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gnsm {

inline constexpr int kProtocolVersion = 1;

enum class SensorState : std::uint8_t { ok, degraded, storage_pressure };

std::string_view to_string(SensorState state) noexcept;
SensorState parse_sensor_state(std::string_view text);

/// Hub-side operating mode of a node, ordered by urgency.
enum class NodeMode : std::uint8_t { normal, warning, anomaly, attack };

std::string_view to_string(NodeMode mode) noexcept;
NodeMode parse_node_mode(std::string_view text);

struct NeighborEdge {
    SensorId peer;
    int hop_weight = 1;
    double utilization = 0.0;

    bool operator==(const NeighborEdge&) const = default;
};

struct TelemetryMessage {
    SensorId sender;
    std::uint64_t seq = 0;
    TimeMs sent_at = 0;
    SensorState state = SensorState::ok;
    SensorRole role = SensorRole::half_cycle;
    bool anomaly_detected = false;
    bool attack_detected = false;
    std::vector<NeighborEdge> neighbor_edges;
    double storage_used_fraction = 0.0;
    bool storage_location_changed = false;
    /// Alerts raised since the previous telemetry; feeds the hub alert pool.
    std::vector<Alert> alerts;

    bool operator==(const TelemetryMessage&) const = default;
};

namespace action {
struct Escalate {
    bool operator==(const Escalate&) const = default;
};
struct PowerSave {
    bool operator==(const PowerSave&) const = default;
};
struct SetRole {
    SensorRole role = SensorRole::half_cycle;
    bool operator==(const SetRole&) const = default;
};
struct RelocateStorage {
    SensorId to;
    bool operator==(const RelocateStorage&) const = default;
};
struct ScheduleUpload {
    TimeMs window_start_ms = 0;
    TimeMs window_end_ms = 0;
    bool operator==(const ScheduleUpload&) const = default;
};
struct QueryState {
    bool operator==(const QueryState&) const = default;
};
}  // namespace action

using ControlAction = std::variant<action::Escalate, action::PowerSave, action::SetRole,
                                   action::RelocateStorage, action::ScheduleUpload>;

std::string describe(const ControlAction& action);

struct ControlSignal {
    SensorId target;
    ControlAction action;
    TimeMs issued_at = 0;
    std::string cause;

    bool operator==(const ControlSignal&) const = default;
};

/// Operator command: the control vocabulary plus query_state.
using HqAction = std::variant<action::QueryState, action::Escalate, action::PowerSave, action::SetRole,
                              action::RelocateStorage, action::ScheduleUpload>;

struct HqCommand {
    HqAction action;
    /// Empty for query_state.
    std::optional<SensorId> target;
    TimeMs issued_at = 0;

    bool operator==(const HqCommand&) const = default;
};

/// Converts an action command to the ControlSignal action; nullopt for query_state.
std::optional<ControlAction> to_control_action(const HqAction& action);

struct HqNodeRow {
    SensorId id;
    SensorRole role = SensorRole::half_cycle;
    double weight = 0.0;
    double prob = 0.0;
    SensorState state = SensorState::ok;
    NodeMode mode = NodeMode::normal;
    double storage_fraction = 0.0;

    bool operator==(const HqNodeRow&) const = default;
};

/// Hub reply on the HQ channel: a state snapshot, an acknowledgement listing
/// the queued signals, or an error.
struct HqResponse {
    bool ok = true;
    std::string error;
    std::string system_string;
    std::vector<HqNodeRow> nodes;
    std::vector<ControlSignal> queued;

    bool operator==(const HqResponse&) const = default;
};

using Message = std::variant<TelemetryMessage, ControlSignal, HqCommand, HqResponse>;

class ProtocolError : public std::runtime_error {
public:
    enum class Kind { incomplete_frame, bad_json, unknown_type, version_mismatch, invalid_body };

    ProtocolError(Kind kind, const std::string& what, std::optional<long long> version = std::nullopt)
        : std::runtime_error(what), kind_(kind), version_(version) {}

    Kind kind() const noexcept { return kind_; }
    /// The `v` seen on the wire, set for version_mismatch.
    std::optional<long long> version() const noexcept { return version_; }

private:
    Kind kind_;
    std::optional<long long> version_;
};

/// Throws ValidationError when the message breaks a type invariant.
void validate(const Message& message);

/// Serializes one message as a single newline-terminated canonical JSON line.
/// Refuses (ValidationError) to frame invalid messages.
std::string frame(const Message& message);

/// Parses exactly one framed line (the trailing `\n` is required).
Message parse(std::string_view line);

/// Type tag of the line ("TEL", "CTL", "HQ" or anything else the log holds)
/// without decoding the body. Throws ProtocolError on malformed JSON.
std::string peek_type(std::string_view line);

/// Per-sender sequence bookkeeping for one connection owner. Stale or
/// duplicated sequence numbers are counted and rejected.
class SeqTracker {
public:
    bool accept(const SensorId& sender, std::uint64_t seq);
    std::optional<std::uint64_t> last(const SensorId& sender) const;
    std::uint64_t duplicates() const noexcept { return duplicates_; }

private:
    std::map<SensorId, std::uint64_t> last_;
    std::uint64_t duplicates_ = 0;
};

/// Splits a byte stream into complete lines (newline kept).
class LineDecoder {
public:
    void feed(std::string_view bytes) { buffer_.append(bytes); }
    std::optional<std::string> next_line();
    bool has_partial() const noexcept { return !buffer_.empty(); }

private:
    std::string buffer_;
};

}  // namespace gnsm
