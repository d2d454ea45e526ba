#pragma once

/// @file energy.hpp
/// @brief Per-role power draw, the fleet energy ledger, and the saving / CO2
/// arithmetic used in reports.

#include "gnsm/core_types.hpp"

#include <cstdint>
#include <map>

namespace gnsm {

/// CO2 avoided per kWh saved: 563.4 mg per hour over a 1.38 -> 0.48 kWh
/// reduction gives 563.4 / 0.9 = 626.0 mg/kWh.
inline constexpr double kCo2MgPerKwh = 626.0;

struct PowerProfile {
    double collection_w = 1.0;
    double half_w = 1.25;
    double full_w = 1.5;
    /// Draw of one static legacy sensor (1380 W / 15 sensors).
    double legacy_sensor_w = 92.0;
    /// Fixed draw added to the managed fleet (hub, radios, ...).
    double infrastructure_w = 0.0;
    double co2_mg_per_kwh = kCo2MgPerKwh;

    bool operator==(const PowerProfile&) const = default;
};

void validate(const PowerProfile& profile);

double power_draw(SensorRole role, const PowerProfile& profile = {}) noexcept;

/// Power in integer microwatts, the unit the ledger accumulates in.
std::int64_t power_draw_uw(SensorRole role, const PowerProfile& profile = {}) noexcept;

/// Microwatt-milliseconds per watt-hour.
inline constexpr double kUwMsPerWh = 3.6e12;

/// Integer accumulation (microwatt-milliseconds) keeps the fleet total an
/// exact sum of its intervals regardless of accumulation order.
class EnergyLedger {
public:
    explicit EnergyLedger(PowerProfile profile = {}) : profile_(profile) { validate(profile_); }

    /// Adds power_draw(role) * dt to `node` and returns the increment in uW*ms.
    std::int64_t accumulate(const SensorId& node, SensorRole role, TimeMs dt_ms);

    double node_wh(const SensorId& node) const;
    double fleet_wh() const noexcept { return static_cast<double>(total_uwms_) / kUwMsPerWh; }
    std::int64_t fleet_uwms() const noexcept { return total_uwms_; }
    const std::map<SensorId, std::int64_t>& per_node_uwms() const noexcept { return per_node_; }
    const PowerProfile& profile() const noexcept { return profile_; }

private:
    PowerProfile profile_;
    std::map<SensorId, std::int64_t> per_node_;
    std::int64_t total_uwms_ = 0;
};

/// 100 * (legacy - iot) / legacy. Throws ValidationError when legacy <= 0.
double fleet_saving_percent(double legacy_kwh, double iot_kwh);

/// kwh_saved * factor. Throws ValidationError for negative input.
double co2_saved_mg(double kwh_saved, double mg_per_kwh = kCo2MgPerKwh);

}  // namespace gnsm
