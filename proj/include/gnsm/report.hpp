#pragma once

/// @file report.hpp
/// @brief Run report: aggregates, the log-only recomputation used by replay,
/// and the text / SVG renderings.

#include "gnsm/core_types.hpp"
#include "gnsm/energy.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnsm {

/// Ground truth for one injected event, as written to the log.
struct TruthEvent {
    std::string id;
    TimeMs at_ms = 0;
    TimeMs duration_ms = 0;
    AlertKind kind = AlertKind::attack_attempt;
    FlowKey key;

    bool operator==(const TruthEvent&) const = default;
};

/// An alert at `t_ms` on `key` belongs to `event` when the keys are equal and
/// t lies in [at, at + duration + slack].
bool matches_event(const FlowKey& key, TimeMs t_ms, const TruthEvent& event, TimeMs slack_ms) noexcept;
/// A confirmed cluster spanning [first, last] belongs to `event` when the keys
/// are equal and the span meets [at, at + duration + slack].
bool confirmed_matches_event(const FlowKey& key, TimeMs first_ms, TimeMs last_ms, const TruthEvent& event,
                             TimeMs slack_ms) noexcept;

struct Report {
    std::uint64_t seed = 0;
    TimeMs duration_ms = 0;
    std::size_t sensors = 0;
    std::string role_management;

    std::uint64_t sessions_offered = 0;
    std::uint64_t packets_offered = 0;
    /// Packets on a flow line while every sensor on that line was in transition.
    std::uint64_t line_packets_dropped = 0;
    std::uint64_t records_dropped_transition = 0;
    std::uint64_t records_dropped_storage = 0;
    std::uint64_t bytes_stored = 0;
    std::uint64_t nic_noise_records = 0;

    std::uint64_t transitions = 0;
    TimeMs transition_drop_ms = 0;
    std::uint64_t control_signals = 0;
    std::uint64_t power_save_signals = 0;

    std::uint64_t alerts_raw = 0;
    std::uint64_t alerts_raw_true = 0;
    std::uint64_t alerts_confirmed = 0;
    std::uint64_t alerts_confirmed_true = 0;
    std::uint64_t events_injected = 0;
    std::uint64_t events_detected = 0;
    std::optional<double> precision_raw;
    std::optional<double> precision_confirmed;
    std::optional<double> recall;

    std::uint64_t relocations = 0;
    std::uint64_t bytes_relocated = 0;
    std::uint64_t uploads = 0;
    std::uint64_t bytes_uploaded = 0;
    std::uint64_t advice_items = 0;

    PowerProfile energy_profile;
    std::map<SensorId, std::int64_t> node_uwms;
    std::int64_t fleet_uwms = 0;
    double fleet_wh = 0.0;
    double iot_kwh = 0.0;
    double legacy_kwh = 0.0;
    double saving_percent = 0.0;
    double co2_saved_mg = 0.0;
    double co2_saved_mg_per_hour = 0.0;

    /// Fleet draw in microwatts after every role change, starting at t = 0.
    std::vector<std::pair<TimeMs, std::int64_t>> power_timeline_uw;
    std::vector<TimeMs> confirmed_times;

    std::string log_sha256;

    bool operator==(const Report&) const = default;
};

/// Fills the derived ratios and energy figures from the counters.
void finalize(Report& report);

std::string report_to_json(const Report& report);
std::string format_summary(const Report& report);
std::string render_svg(const Report& report);

class LogError : public std::runtime_error {
public:
    LogError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Recomputes the report from log lines alone (each line without its
/// trailing newline). Throws LogError naming the 1-based line number.
Report build_report_from_log(std::span<const std::string> lines);

/// Reads a log file; a final line without a newline counts as truncated.
std::vector<std::string> read_log(const std::filesystem::path& path);

/// Lowercase hex SHA-256 over the lines, each followed by a newline.
std::string log_sha256(std::span<const std::string> lines);

}  // namespace gnsm
