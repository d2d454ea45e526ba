#pragma once

/// @file scenario.hpp
/// @brief Simulation scenario model and its JSON file form.
///
/// Scenario file keys (all optional except `sensors`; defaults in brackets):
///
///   seed                  integer RNG seed [1]
///   duration_ms           simulated time, > 0 [86400000]
///   capture_step_ms       capture granularity [60000]
///   telemetry_interval_ms sensor -> hub telemetry period [60000]
///   decision_interval_ms  hub decide/dispatch period [60000]
///   control_latency_ms    hub -> sensor signal latency [50]
///   role_management       "hub" or "pinned_full" ["hub"]
///   sensors               [{id, site, capacity_bytes?, initial_used_bytes?}]
///   edges                 [{a, b, hop_weight, utilization}]; "hub" is a valid endpoint
///   flow_lines            [[sensor ids sharing one traffic path]]; others get their own line
///   traffic               {site: {sessions_per_sec, mean_session_bytes,
///                          peak_multiplier, peak_hours: [[from_h, to_h]]}}; key "default" applies to unlisted sites
///   nic_noise_rate        per sensor and capture step probability of a garbled excerpt [0.0]
///   rules                 detection rules in ruleset-line syntax
///   events                [{id, at_ms, duration_ms, kind, sensors, flow, payload?, bytes_per_sec?}]
///   transition_latency_ms {min, max} within [0, 35000] [{5000, 35000}]
///   energy                {collection_w, half_w, full_w, legacy_sensor_w, infrastructure_w, co2_mg_per_kwh}
///   hub                   {quiet_period_ms, power_save_floor, alpha, storage_ceiling, weight_decay}
///   pooling               {window_ms, quorum, severity_gate (null disables)}
///   ga                    {pop_size, crossover_rate, mutation_rate, elitism_count, interval_ms}
///   upload                {windows_h: [[from_h, to_h]], max_bytes_per_window}
///   storage               {pressure_threshold, flow_share, pstr_share}

#include "gnsm/core_types.hpp"
#include "gnsm/energy.hpp"
#include "gnsm/ga_advisor.hpp"
#include "gnsm/pooling.hpp"
#include "gnsm/sensor_node.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gnsm {

struct SensorSpec {
    SensorId id;
    Site site = Site::plant;
    std::uint64_t capacity_bytes = 2'000'000'000'000ULL;
    std::uint64_t initial_used_bytes = 0;
};

struct EdgeSpec {
    SensorId a;
    SensorId b;
    int hop_weight = 1;
    double utilization = 0.0;
};

struct HourWindow {
    double from_h = 0.0;
    double to_h = 0.0;
};

struct TrafficProfile {
    double sessions_per_sec = 0.02;
    double mean_session_bytes = 5.0e6;
    double peak_multiplier = 3.0;
    std::vector<HourWindow> peak_hours{{8.0, 9.5}, {13.5, 14.5}};

    /// Rate multiplier at time `t_ms` (time of day taken modulo 24 h).
    double multiplier_at(TimeMs t_ms) const noexcept;
};

struct InjectedEvent {
    std::string id;
    TimeMs at_ms = 0;
    TimeMs duration_ms = 60'000;
    AlertKind kind = AlertKind::attack_attempt;
    std::vector<SensorId> sensors;
    FlowKey key;
    /// PSTR content carried by attack traffic.
    std::string payload = "GET /scripts/..%255c../winnt/system32/cmd.exe?/c+dir";
    /// Byte rate of anomaly traffic.
    double bytes_per_sec = 2.0e7;

    bool active_at(TimeMs t) const noexcept { return t >= at_ms && t < at_ms + duration_ms; }
};

enum class RoleManagement : std::uint8_t { hub, pinned_full };

struct HubParams {
    TimeMs quiet_period_ms = 300'000;
    SensorRole power_save_floor = SensorRole::collection_only;
    double alpha = 1.0;
    double storage_ceiling = 0.5;
    double weight_decay = 0.9;
};

struct GaSettings {
    GaParams params;
    TimeMs interval_ms = 3'600'000;
};

struct UploadSettings {
    std::vector<HourWindow> windows_h{{1.0, 3.0}};
    std::uint64_t max_bytes_per_window = 50'000'000'000ULL;
};

struct StorageSettings {
    double pressure_threshold = 0.8;
    VolumeModel volume;
};

struct Scenario {
    std::uint64_t seed = 1;
    TimeMs duration_ms = 86'400'000;
    TimeMs capture_step_ms = 60'000;
    TimeMs telemetry_interval_ms = 60'000;
    TimeMs decision_interval_ms = 60'000;
    TimeMs control_latency_ms = 50;
    RoleManagement role_management = RoleManagement::hub;
    std::vector<SensorSpec> sensors;
    std::vector<EdgeSpec> edges;
    std::vector<std::vector<SensorId>> flow_lines;
    std::map<std::string, TrafficProfile> traffic;
    double nic_noise_rate = 0.0;
    std::vector<DetectionRule> rules;
    std::vector<InjectedEvent> events;
    TimeMs latency_min_ms = 5'000;
    TimeMs latency_max_ms = 35'000;
    PowerProfile energy;
    HubParams hub;
    PoolParams pooling;
    GaSettings ga;
    UploadSettings upload;
    StorageSettings storage;

    /// Traffic profile for a site, falling back to "default", then built-ins.
    TrafficProfile profile_for(Site site) const;
    /// Explicit flow lines followed by singleton lines for uncovered sensors.
    std::vector<std::vector<SensorId>> resolved_flow_lines() const;
};

/// Throws ValidationError describing the first violated invariant.
void validate(const Scenario& scenario);

Scenario scenario_from_json(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);

/// The default ruleset used when a scenario lists none.
std::vector<DetectionRule> default_rules();

/// A 15-sensor fleet laid out like the plant case study: plant, sales,
/// server room and three branches, wired to the hub, with a few shared flow
/// lines, quiet and busy periods, and `attacks` injected attack events.
Scenario make_fleet_scenario(std::uint64_t seed, TimeMs duration_ms, std::size_t attacks = 2);

}  // namespace gnsm
