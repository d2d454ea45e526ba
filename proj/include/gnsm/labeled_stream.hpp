#pragma once

/// @file labeled_stream.hpp
/// @brief Synthetic alert streams with ground truth, for measuring the
/// pooling filter.

#include "gnsm/core_types.hpp"

#include <cstdint>
#include <vector>

namespace gnsm {

struct LabeledStreamParams {
    std::size_t sensors = 15;
    TimeMs duration_ms = 600'000;
    /// Each sensor independently raises a false alert in a slot with
    /// probability `false_positive_rate`.
    TimeMs slot_ms = 1'000;
    double false_positive_rate = 0.1;
    std::size_t true_events = 20;
    std::size_t min_witnesses = 2;
    std::size_t max_witnesses = 4;
    /// Spread of witness alert times after the event start.
    TimeMs jitter_ms = 400;
};

struct LabeledEvent {
    FlowKey key;
    TimeMs at_ms = 0;
    AlertKind kind = AlertKind::anomaly;
    int severity = 1;
    std::vector<SensorId> witnesses;
};

struct LabeledAlert {
    Alert alert;
    bool truth = false;
};

struct LabeledStream {
    std::vector<LabeledEvent> events;
    /// Sorted by time, then source.
    std::vector<LabeledAlert> alerts;
};

/// True events use keys in 10.1.0.0/16 and never collide with false-positive
/// keys (192.168.0.0/16). Deterministic in `seed`.
LabeledStream generate_labeled_stream(const LabeledStreamParams& params, std::uint64_t seed);

}  // namespace gnsm
