#pragma once

/// @file sensor_node.hpp
/// @brief The sensor agent: role state machine, simulated capture pipeline,
/// local detection, storage accounting and telemetry emission.

#include "gnsm/core_types.hpp"
#include "gnsm/messaging.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gnsm {

struct DetectionRule {
    enum class Type : std::uint8_t { signature, threshold };

    Type type = Type::signature;
    int severity = 1;

    // signature rules
    std::string substring;
    AlertKind kind = AlertKind::attack_attempt;
    /// Optional flow-key predicate; matches any port when unset.
    std::optional<std::uint16_t> dst_port;

    // threshold rules
    double bytes_per_sec = 0.0;
    TimeMs window_ms = 0;

    bool operator==(const DetectionRule&) const = default;
};

void validate(const DetectionRule& rule);

/// One rule per line:
///   signature|<substr>|<anomaly|attack_attempt>|<severity>[|dport=<n>]
///   threshold|<bytes_per_sec>|<window_ms>|<severity>
/// Blank lines and lines starting with '#' are ignored. Throws
/// ValidationError naming the 1-based line on malformed input.
std::vector<DetectionRule> parse_ruleset(std::string_view text);
std::vector<DetectionRule> load_ruleset(const std::filesystem::path& path);
std::string format_rule(const DetectionRule& rule);

/// The subset of control actions that move a sensor between roles.
using RoleAction = std::variant<action::Escalate, action::PowerSave, action::SetRole>;

/// Saturating three-state chain: escalate steps up, power_save steps down,
/// set_role jumps.
SensorRole apply_control(SensorRole role, const RoleAction& action) noexcept;

/// Extracts the role action of a control signal, if it has one.
std::optional<RoleAction> role_action_of(const ControlAction& action) noexcept;

/// Share of a session's full-capture volume taken by its flow record and its
/// PSTR excerpt. The full-packet record holds the remainder, so a full-cycle
/// sensor writes exactly the session's byte count.
struct VolumeModel {
    double flow_share = 0.001;
    double pstr_share = 0.01;
};

/// Bytes a record occupies once written to sensor storage.
std::uint64_t storage_footprint(const CaptureRecord& record, const VolumeModel& model = {});

/// Whether a sensor in `role` retains records of `kind`.
bool stores(SensorRole role, RecordKind kind) noexcept;

inline constexpr double kSaturatedBytesPerDay = 1e12;

/// Storage written per day by a sensor in `role` when offered
/// `offered_bytes_per_day` of full-capture traffic.
double storage_growth_rate(SensorRole role, double offered_bytes_per_day = kSaturatedBytesPerDay,
                           const VolumeModel& model = {});

inline constexpr TimeMs kMaxTransitionLatencyMs = 35'000;

/// A role change and the half-open window [drop_start_ms, drop_end_ms)
/// during which the sensor's capture output is discarded.
struct TransitionEvent {
    SensorId sensor;
    SensorRole from = SensorRole::half_cycle;
    SensorRole to = SensorRole::half_cycle;
    TimeMs requested_at = 0;
    TimeMs drop_start_ms = 0;
    TimeMs drop_end_ms = 0;

    TimeMs drop_length() const noexcept { return drop_end_ms - drop_start_ms; }
    bool operator==(const TransitionEvent&) const = default;
};

struct CaptureResult {
    std::vector<CaptureRecord> stored;
    std::vector<Alert> alerts;
    std::uint64_t dropped_in_transition = 0;
    std::uint64_t dropped_storage = 0;

    std::uint64_t dropped_count() const noexcept { return dropped_in_transition + dropped_storage; }
};

inline constexpr double kSignatureConfidence = 0.9;

/// Runs `rules` over `records` for a detection step ending at `now_ms`.
/// Signature rules scan PSTR excerpts; threshold rules compare the byte rate
/// of flow records whose end falls in (now_ms - window, now_ms] against the
/// limit. At most one alert per (rule, flow key); output ordered by rule
/// index, then flow key.
std::vector<Alert> detect(const SensorId& source, std::span<const CaptureRecord> records,
                          std::span<const DetectionRule> rules, TimeMs now_ms);

struct SensorConfig {
    std::uint64_t capacity_bytes = 2'000'000'000'000ULL;
    /// Storage fraction at and above which the sensor reports storage_pressure.
    double pressure_threshold = 0.8;
    VolumeModel volume;
};

class SensorNode {
public:
    SensorNode(SensorId id, SensorRole initial_role, SensorConfig config = {},
               std::vector<DetectionRule> rules = {});

    const SensorId& id() const noexcept { return id_; }
    SensorRole role() const noexcept { return role_; }
    const SensorConfig& config() const noexcept { return config_; }
    const std::vector<DetectionRule>& rules() const noexcept { return rules_; }

    std::uint64_t storage_used() const noexcept { return storage_used_; }
    std::uint64_t storage_capacity() const noexcept { return config_.capacity_bytes; }
    double storage_fraction() const noexcept;

    std::optional<TimeMs> in_transition_until() const noexcept { return transition_until_; }
    bool in_transition(TimeMs t) const noexcept;
    std::uint64_t telemetry_seq() const noexcept { return telemetry_seq_; }

    /// Starts a role change. A request made while a previous transition is
    /// still running is queued behind it. Throws ValidationError for a
    /// latency outside [0, 35000] ms.
    TransitionEvent begin_transition(SensorRole new_role, TimeMs now_ms, TimeMs latency_ms);

    /// Processes traffic offered during [now_ms, now_ms + dt_ms). Records whose
    /// start falls inside a transition window are dropped; the rest are stored
    /// per role and, for roles above collection-only, run through detection.
    CaptureResult step_capture(std::span<const CaptureRecord> offered, TimeMs now_ms, TimeMs dt_ms);

    SensorState state(TimeMs now_ms) const noexcept;

    TelemetryMessage emit_telemetry(std::vector<NeighborEdge> neighbor_edges, TimeMs now_ms);

    /// Frees up to `bytes` (cloud upload or relocation away). Returns bytes freed.
    std::uint64_t release_storage(std::uint64_t bytes) noexcept;
    /// Accepts up to `bytes` from a relocating neighbor without crossing
    /// `ceiling_fraction` of capacity. Returns bytes accepted.
    std::uint64_t absorb_storage(std::uint64_t bytes, double ceiling_fraction) noexcept;
    void mark_storage_relocated() noexcept { storage_moved_ = true; }

private:
    SensorId id_;
    SensorRole role_;
    SensorConfig config_;
    std::vector<DetectionRule> rules_;
    std::uint64_t storage_used_ = 0;
    std::optional<TimeMs> transition_from_;
    std::optional<TimeMs> transition_until_;
    std::uint64_t telemetry_seq_ = 0;
    std::deque<CaptureRecord> flow_history_;
    std::vector<Alert> pending_alerts_;
    bool storage_moved_ = false;
    bool storage_overflowed_ = false;
};

}  // namespace gnsm
