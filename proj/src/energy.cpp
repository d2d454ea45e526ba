#include "gnsm/energy.hpp"

#include <cmath>

namespace gnsm {

void validate(const PowerProfile& p) {
    for (double w : {p.collection_w, p.half_w, p.full_w, p.legacy_sensor_w, p.infrastructure_w, p.co2_mg_per_kwh}) {
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("power constants must be finite and >= 0");
    }
}

double power_draw(SensorRole role, const PowerProfile& profile) noexcept {
    switch (role) {
        case SensorRole::collection_only: return profile.collection_w;
        case SensorRole::half_cycle: return profile.half_w;
        case SensorRole::full_cycle: return profile.full_w;
    }
    return profile.full_w;
}

std::int64_t power_draw_uw(SensorRole role, const PowerProfile& profile) noexcept {
    return std::llround(power_draw(role, profile) * 1e6);
}

std::int64_t EnergyLedger::accumulate(const SensorId& node, SensorRole role, TimeMs dt_ms) {
    if (dt_ms < 0) throw ValidationError("negative accumulation interval");
    const std::int64_t inc = power_draw_uw(role, profile_) * dt_ms;
    per_node_[node] += inc;
    total_uwms_ += inc;
    return inc;
}

double EnergyLedger::node_wh(const SensorId& node) const {
    auto it = per_node_.find(node);
    return it == per_node_.end() ? 0.0 : static_cast<double>(it->second) / kUwMsPerWh;
}

double fleet_saving_percent(double legacy_kwh, double iot_kwh) {
    if (!(legacy_kwh > 0.0)) throw ValidationError("legacy consumption must be > 0");
    return 100.0 * (legacy_kwh - iot_kwh) / legacy_kwh;
}

double co2_saved_mg(double kwh_saved, double mg_per_kwh) {
    if (!(kwh_saved >= 0.0)) throw ValidationError("saved energy must be >= 0");
    return kwh_saved * mg_per_kwh;
}

}  // namespace gnsm
