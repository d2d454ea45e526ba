#pragma once

/// @file hub.hpp
/// @brief The hub: telemetry ingestion, role decisions, storage placement,
/// alert pooling, cloud-upload scheduling and the HQ command path.

#include "gnsm/core_types.hpp"
#include "gnsm/messaging.hpp"
#include "gnsm/nssm.hpp"
#include "gnsm/pooling.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnsm {

class UnknownSensorError : public std::runtime_error {
public:
    explicit UnknownSensorError(SensorId id)
        : std::runtime_error("unknown sensor " + id.str()), id_(std::move(id)) {}
    const SensorId& id() const noexcept { return id_; }

private:
    SensorId id_;
};

struct HubConfig {
    SensorId hub_id{"hub"};
    /// Quiet time (no alerts) after which a normal node is stepped down.
    TimeMs quiet_period_ms = 300'000;
    /// Quiet step-downs never go below this role.
    SensorRole power_save_floor = SensorRole::collection_only;
    NssmParams nssm;
    PoolParams pooling;
    std::uint64_t sensor_capacity_bytes = 2'000'000'000'000ULL;
    /// Decay of the per-node alert-rate moving average kept as `weight`.
    double weight_decay = 0.9;
};

struct NodeRecord {
    SensorRole role = SensorRole::half_cycle;
    double weight = 0.5;
    double prob = 0.5;
    SensorState state = SensorState::ok;
    double storage_fraction = 0.0;
    std::uint64_t last_seq = 0;
    NodeMode mode = NodeMode::normal;
    /// Start of the current quiet period: last alert or last step-down.
    TimeMs quiet_since = 0;
    bool relocation_pending = false;
    /// Storage capacity; 0 means the hub-wide default.
    std::uint64_t capacity_bytes = 0;

    bool operator==(const NodeRecord&) const = default;
};

struct HubState {
    HubConfig config;
    TimeMs now_ms = 0;
    std::map<SensorId, NodeRecord> nodes;
    TopologyGraph topology;
    /// Operator signals waiting for the next dispatch.
    std::vector<ControlSignal> pending_signals;
    std::uint64_t duplicate_telemetry = 0;
};

/// Cause codes attached to hub-issued signals.
namespace cause {
inline constexpr const char* attack = "attack";
inline constexpr const char* attack_neighbor = "attack_neighbor";
inline constexpr const char* anomaly = "anomaly";
inline constexpr const char* quiet = "quiet";
inline constexpr const char* storage = "storage_pressure";
inline constexpr const char* upload = "cloud_upload";
inline constexpr const char* operator_command = "hq";
}  // namespace cause

/// Autonomous decisions for the current state, grouped by rule priority
/// (attack, anomaly, quiet step-down, storage relocation) and by node id
/// within a rule. Pure: equal states give identical signal lists.
std::vector<ControlSignal> decide(const HubState& state);

struct UploadWindow {
    TimeMs start_ms = 0;
    TimeMs end_ms = 0;
    bool operator==(const UploadWindow&) const = default;
};

struct UploadPolicy {
    std::vector<UploadWindow> windows;
    std::uint64_t max_bytes_per_window = 0;
};

struct NodeStorage {
    double fraction = 0.0;
    std::uint64_t bytes = 0;
};

struct UploadAssignment {
    SensorId node;
    std::size_t window_index = 0;
    UploadWindow window;
    std::uint64_t bytes = 0;
    bool operator==(const UploadAssignment&) const = default;
};

using UploadPlan = std::vector<UploadAssignment>;

/// Greedy plan: nodes in descending storage fraction (ties by id), each
/// window filled up to its byte budget, remainders spilling forward.
/// Throws ValidationError for unordered or overlapping windows.
UploadPlan schedule_cloud_upload(const std::map<SensorId, NodeStorage>& storage, const UploadPolicy& policy);

class Hub {
public:
    using Sink = std::function<void(const std::string& line)>;

    /// Every fleet sensor starts in collection-and-detection with neutral
    /// weight and probability.
    Hub(HubConfig config, const std::vector<SensorId>& fleet, TopologyGraph topology = {});

    const HubState& state() const noexcept { return state_; }
    const HubConfig& config() const noexcept { return state_.config; }

    /// Receives a copy of every ingested and emitted framed message.
    void set_sink(Sink sink) { sink_ = std::move(sink); }

    /// Returns false for stale or duplicate sequence numbers, which only bump
    /// the duplicate counter. Unknown senders are registered on the fly.
    bool ingest_telemetry(const TelemetryMessage& msg);

    void advance_clock(TimeMs now_ms);

    /// Operator signals first, then decide(); all are acknowledged and logged.
    std::vector<ControlSignal> dispatch(TimeMs now_ms);

    /// Applies the hub-side bookkeeping of an emitted signal.
    void acknowledge(const ControlSignal& signal);

    /// query_state answers with the system string and node table; actions
    /// are queued ahead of autonomous output. Throws UnknownSensorError.
    HqResponse hq_command(const HqCommand& cmd);

    /// hq_command with errors turned into a failed response. Both the command
    /// and the response are logged.
    HqResponse handle_hq(const HqCommand& cmd);

    NodeStateTable node_state_table() const;
    std::string system_string() const { return encode_system_string(node_state_table()); }
    std::vector<HqNodeRow> node_rows() const;

    std::map<SensorId, double> storage_fractions() const;
    UploadPlan plan_cloud_upload(const UploadPolicy& policy) const;
    /// Plan turned into schedule_upload signals, one per assignment.
    std::vector<ControlSignal> upload_signals(const UploadPlan& plan) const;

    /// Plans, acknowledges and logs the upload signals in one step.
    std::vector<ControlSignal> dispatch_upload(const UploadPolicy& policy, TimeMs now_ms);

    void set_probability(const SensorId& id, double prob);
    void set_capacity(const SensorId& id, std::uint64_t capacity_bytes);

    AlertPool& alert_pool() noexcept { return pool_; }

    /// Rebuilds hub state from a persisted log: telemetry is re-ingested and
    /// control lines are re-acknowledged. Lines with other tags are skipped.
    /// The trailing newline of each line is optional.
    void replay(std::span<const std::string> lines);

private:
    NodeRecord& record_for(const SensorId& id);
    void emit(const Message& message) const;

    HubState state_;
    AlertPool pool_;
    Sink sink_;
};

}  // namespace gnsm
