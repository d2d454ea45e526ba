#pragma once

/// @file simulator.hpp
/// @brief Deterministic discrete-event run of a scenario, and the flow-line
/// backup coverage model.

#include "gnsm/core_types.hpp"
#include "gnsm/report.hpp"
#include "gnsm/scenario.hpp"
#include "gnsm/sensor_node.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace gnsm {

/// Half-open time interval [start_ms, end_ms).
struct Interval {
    TimeMs start_ms = 0;
    TimeMs end_ms = 0;
    bool contains(TimeMs t) const noexcept { return t >= start_ms && t < end_ms; }
};

/// Packets (given by their times) lost on a flow line: a packet is lost only
/// when every sensor on the line is in transition at its time. Sensors absent
/// from `transitions` are never in transition. Throws ValidationError for an
/// empty line or a sensor missing from the topology.
std::uint64_t flow_line_backup_coverage(const TopologyGraph& topology, std::span<const SensorId> flow_line,
                                        const std::map<SensorId, std::vector<Interval>>& transitions,
                                        std::span<const TimeMs> packet_times);

struct SimOptions {
    /// Without the log, the run skips framing entirely and the report has no
    /// log hash. Used for large parameter sweeps.
    bool keep_log = true;
};

struct SimResult {
    std::vector<std::string> log;
    Report report;
    std::vector<TransitionEvent> transitions;
};

/// Runs the scenario. Throws ValidationError before any event for an
/// invalid scenario.
SimResult run(const Scenario& scenario, const SimOptions& options = {});

TopologyGraph build_topology(const Scenario& scenario);

}  // namespace gnsm
