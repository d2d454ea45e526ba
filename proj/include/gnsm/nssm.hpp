#pragma once

/// @file nssm.hpp
/// @brief Neighbor storage sharing: pick the closest sensor with spare
/// storage, by Dijkstra over hop count inflated by link utilization.

#include "gnsm/core_types.hpp"

#include <map>
#include <optional>

namespace gnsm {

struct NssmParams {
    /// Utilization weighting: cost = hop * (1 + alpha * utilization).
    double alpha = 1.0;
    /// Candidates must sit strictly below this storage fraction.
    double storage_ceiling = 0.5;
};

/// Distances closer than this are treated as ties.
inline constexpr double kDistanceEpsilon = 1e-9;

double nssm_edge_cost(const EdgeAttrs& edge, double alpha) noexcept;

/// Single-source shortest distances; unreachable vertices are absent.
std::map<SensorId, double> shortest_distances(const TopologyGraph& graph, const SensorId& source, double alpha);

/// Nearest reachable candidate (storage fraction below the ceiling, not the
/// source itself) with ties broken by the smaller id. Vertices missing from
/// `storage_fractions` are never candidates. Throws ValidationError when the
/// source is not in the graph.
std::optional<SensorId> nssm_select(const TopologyGraph& graph, const SensorId& source,
                                    const std::map<SensorId, double>& storage_fractions,
                                    const NssmParams& params = {});

}  // namespace gnsm
