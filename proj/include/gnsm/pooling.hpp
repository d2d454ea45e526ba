#pragma once

/// @file pooling.hpp
/// @brief Second-level alert confirmation across sensors.
///
/// Alerts on the same flow key are chained into clusters whenever
/// consecutive alerts are at most `window_ms` apart, so every sliding window
/// of that width lies inside exactly one cluster. A cluster is confirmed when
/// some window of width `window_ms` inside it holds alerts from at least
/// `quorum` distinct sensors, or when it contains an attack_attempt at or
/// above the severity gate.

#include "gnsm/core_types.hpp"

#include <optional>
#include <set>
#include <span>
#include <vector>

namespace gnsm {

struct PoolParams {
    TimeMs window_ms = 1000;
    int quorum = 2;
    /// Lone attack_attempts at or above this severity bypass the quorum.
    /// Unset disables the gate.
    std::optional<int> severity_gate = 4;
};

void validate(const PoolParams& params);

struct ConfirmedAlert {
    FlowKey key;
    TimeMs first_ms = 0;
    TimeMs last_ms = 0;
    AlertKind kind = AlertKind::anomaly;
    int max_severity = 1;
    double mean_confidence = 0.0;
    std::set<SensorId> sensors;
    std::size_t alert_count = 0;
    /// True when confirmed through the severity gate rather than the quorum.
    bool gated = false;

    bool operator==(const ConfirmedAlert&) const = default;
};

/// Largest number of distinct sensors seen inside any window of width
/// `window_ms` over alerts sorted by time.
std::size_t max_distinct_sensors_in_window(std::span<const Alert> sorted, TimeMs window_ms);

/// Output is ordered by (first_ms, flow key).
std::vector<ConfirmedAlert> pool_filter(std::span<const Alert> alerts, const PoolParams& params);

/// Incremental form used by the hub: alerts accumulate, and clusters are
/// released once no further alert can extend them.
class AlertPool {
public:
    explicit AlertPool(PoolParams params) : params_(params) { validate(params_); }

    void add(const Alert& alert) { pending_.push_back(alert); }
    std::size_t pending() const noexcept { return pending_.size(); }

    /// Confirms and removes clusters whose last alert is older than
    /// now_ms - window_ms - report_delay_ms. Unconfirmed closed clusters are
    /// discarded.
    std::vector<ConfirmedAlert> release(TimeMs now_ms, TimeMs report_delay_ms);
    /// Releases everything still pending.
    std::vector<ConfirmedAlert> flush();

    const PoolParams& params() const noexcept { return params_; }

private:
    PoolParams params_;
    std::vector<Alert> pending_;
};

}  // namespace gnsm
