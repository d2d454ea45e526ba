#include "gnsm/pooling.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace gnsm {

void validate(const PoolParams& params) {
    if (params.window_ms <= 0) throw ValidationError("pooling window must be > 0");
    if (params.quorum < 1) throw ValidationError("pooling quorum must be >= 1");
    if (params.severity_gate && (*params.severity_gate < 1 || *params.severity_gate > 5)) {
        throw ValidationError("severity gate outside 1..5");
    }
}

std::size_t max_distinct_sensors_in_window(std::span<const Alert> sorted, TimeMs window_ms) {
    std::map<SensorId, std::size_t> counts;
    std::size_t best = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < sorted.size(); ++hi) {
        ++counts[sorted[hi].source];
        while (sorted[hi].time_ms - sorted[lo].time_ms > window_ms) {
            auto it = counts.find(sorted[lo].source);
            if (--it->second == 0) counts.erase(it);
            ++lo;
        }
        best = std::max(best, counts.size());
    }
    return best;
}

namespace {

bool alert_order(const Alert& a, const Alert& b) {
    return std::tie(a.time_ms, a.source, a.kind, a.severity, a.confidence) <
           std::tie(b.time_ms, b.source, b.kind, b.severity, b.confidence);
}

struct Cluster {
    std::vector<Alert> alerts;
};

std::map<FlowKey, std::vector<Cluster>> cluster_by_flow(std::span<const Alert> alerts, TimeMs window_ms) {
    std::map<FlowKey, std::vector<Alert>> by_key;
    for (const auto& a : alerts) by_key[a.key].push_back(a);
    std::map<FlowKey, std::vector<Cluster>> out;
    for (auto& [key, list] : by_key) {
        std::sort(list.begin(), list.end(), alert_order);
        auto& clusters = out[key];
        for (const auto& a : list) {
            if (clusters.empty() || a.time_ms - clusters.back().alerts.back().time_ms > window_ms) {
                clusters.emplace_back();
            }
            clusters.back().alerts.push_back(a);
        }
    }
    return out;
}

std::optional<ConfirmedAlert> confirm(const FlowKey& key, const Cluster& cluster, const PoolParams& params) {
    const auto& alerts = cluster.alerts;
    bool gated = false;
    if (params.severity_gate) {
        gated = std::any_of(alerts.begin(), alerts.end(), [&](const Alert& a) {
            return a.kind == AlertKind::attack_attempt && a.severity >= *params.severity_gate;
        });
    }
    bool quorum = max_distinct_sensors_in_window(alerts, params.window_ms) >= static_cast<std::size_t>(params.quorum);
    if (!quorum && !gated) return std::nullopt;

    ConfirmedAlert c;
    c.key = key;
    c.first_ms = alerts.front().time_ms;
    c.last_ms = alerts.back().time_ms;
    double confidence = 0.0;
    for (const auto& a : alerts) {
        if (a.kind == AlertKind::attack_attempt) c.kind = AlertKind::attack_attempt;
        c.max_severity = std::max(c.max_severity, a.severity);
        confidence += a.confidence;
        c.sensors.insert(a.source);
    }
    c.alert_count = alerts.size();
    c.mean_confidence = confidence / static_cast<double>(alerts.size());
    c.gated = !quorum;
    return c;
}

void sort_confirmed(std::vector<ConfirmedAlert>& out) {
    std::sort(out.begin(), out.end(), [](const ConfirmedAlert& a, const ConfirmedAlert& b) {
        return std::tie(a.first_ms, a.key) < std::tie(b.first_ms, b.key);
    });
}

}  // namespace

std::vector<ConfirmedAlert> pool_filter(std::span<const Alert> alerts, const PoolParams& params) {
    validate(params);
    std::vector<ConfirmedAlert> out;
    for (const auto& [key, clusters] : cluster_by_flow(alerts, params.window_ms)) {
        for (const auto& cluster : clusters) {
            if (auto c = confirm(key, cluster, params)) out.push_back(std::move(*c));
        }
    }
    sort_confirmed(out);
    return out;
}

std::vector<ConfirmedAlert> AlertPool::release(TimeMs now_ms, TimeMs report_delay_ms) {
    const TimeMs horizon = now_ms - report_delay_ms - params_.window_ms;
    std::vector<ConfirmedAlert> out;
    std::vector<Alert> keep;
    for (const auto& [key, clusters] : cluster_by_flow(pending_, params_.window_ms)) {
        for (const auto& cluster : clusters) {
            if (cluster.alerts.back().time_ms < horizon) {
                if (auto c = confirm(key, cluster, params_)) out.push_back(std::move(*c));
            } else {
                keep.insert(keep.end(), cluster.alerts.begin(), cluster.alerts.end());
            }
        }
    }
    pending_ = std::move(keep);
    sort_confirmed(out);
    return out;
}

std::vector<ConfirmedAlert> AlertPool::flush() {
    auto out = pool_filter(pending_, params_);
    pending_.clear();
    return out;
}

}  // namespace gnsm
