#include "gnsm/nssm.hpp"

#include <functional>
#include <queue>
#include <vector>

namespace gnsm {

double nssm_edge_cost(const EdgeAttrs& edge, double alpha) noexcept {
    const double hops = static_cast<double>(edge.hop_weight);
    return hops + alpha * edge.utilization * hops;
}

std::map<SensorId, double> shortest_distances(const TopologyGraph& graph, const SensorId& source, double alpha) {
    if (!graph.contains(source)) throw ValidationError("source " + source.str() + " not in topology");
    using Entry = std::pair<double, SensorId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    std::map<SensorId, double> dist;
    std::map<SensorId, bool> done;
    dist[source] = 0.0;
    frontier.emplace(0.0, source);
    while (!frontier.empty()) {
        auto [d, node] = frontier.top();
        frontier.pop();
        if (done[node]) continue;
        done[node] = true;
        for (const auto& [peer, attrs] : graph.neighbors(node)) {
            double candidate = d + nssm_edge_cost(attrs, alpha);
            auto it = dist.find(peer);
            if (it == dist.end() || candidate < it->second) {
                dist[peer] = candidate;
                frontier.emplace(candidate, peer);
            }
        }
    }
    return dist;
}

std::optional<SensorId> nssm_select(const TopologyGraph& graph, const SensorId& source,
                                    const std::map<SensorId, double>& storage_fractions, const NssmParams& params) {
    auto dist = shortest_distances(graph, source, params.alpha);
    auto candidate = [&](const SensorId& node) {
        if (node == source) return false;
        auto frac = storage_fractions.find(node);
        return frac != storage_fractions.end() && frac->second < params.storage_ceiling;
    };
    std::optional<double> nearest;
    for (const auto& [node, d] : dist) {
        if (candidate(node) && (!nearest || d < *nearest)) nearest = d;
    }
    if (!nearest) return std::nullopt;
    // dist iterates in ascending id order: the first node within the tie
    // tolerance is the smallest id.
    for (const auto& [node, d] : dist) {
        if (candidate(node) && d <= *nearest + kDistanceEpsilon) return node;
    }
    return std::nullopt;
}

}  // namespace gnsm
