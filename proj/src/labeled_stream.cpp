#include "gnsm/labeled_stream.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>
#include <random>

namespace gnsm {

LabeledStream generate_labeled_stream(const LabeledStreamParams& p, std::uint64_t seed) {
    if (p.sensors < p.max_witnesses || p.min_witnesses < 1 || p.min_witnesses > p.max_witnesses) {
        throw ValidationError("witness bounds must satisfy 1 <= min <= max <= sensors");
    }
    if (p.duration_ms <= 0 || p.slot_ms <= 0 || p.jitter_ms < 0) throw ValidationError("invalid stream timing");
    if (!(p.false_positive_rate >= 0.0 && p.false_positive_rate <= 1.0)) throw ValidationError("rate outside [0,1]");

    std::mt19937_64 rng(seed);
    std::vector<SensorId> fleet;
    for (std::size_t i = 0; i < p.sensors; ++i) fleet.emplace_back(fmt::format("s{:02}", i + 1));

    std::uniform_int_distribution<int> severity(1, 5);
    std::uniform_int_distribution<int> kind(0, 1);
    std::uniform_int_distribution<std::uint32_t> host(1, 0xfffe);
    std::uniform_int_distribution<int> port(1024, 65535);
    std::uniform_real_distribution<double> confidence(0.3, 1.0);

    LabeledStream out;
    std::uniform_int_distribution<TimeMs> when(0, std::max<TimeMs>(p.duration_ms - p.jitter_ms - 1, 0));
    std::uniform_int_distribution<std::size_t> witnesses(p.min_witnesses, p.max_witnesses);
    std::uniform_int_distribution<TimeMs> jitter(0, p.jitter_ms);
    for (std::size_t e = 0; e < p.true_events; ++e) {
        LabeledEvent ev;
        ev.key = FlowKey{(10u << 24) | (1u << 16) | static_cast<std::uint32_t>(e + 1), (10u << 24) | host(rng),
                         static_cast<std::uint16_t>(port(rng)), 445, 6};
        ev.at_ms = when(rng);
        ev.kind = kind(rng) ? AlertKind::attack_attempt : AlertKind::anomaly;
        ev.severity = severity(rng);
        std::vector<SensorId> pool = fleet;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(witnesses(rng));
        std::sort(pool.begin(), pool.end());
        ev.witnesses = pool;
        for (const auto& id : ev.witnesses) {
            out.alerts.push_back({Alert{id, ev.at_ms + jitter(rng), ev.kind, ev.severity, ev.key, confidence(rng)}, true});
        }
        out.events.push_back(std::move(ev));
    }

    std::bernoulli_distribution fires(p.false_positive_rate);
    std::uniform_int_distribution<TimeMs> within(0, p.slot_ms - 1);
    for (TimeMs slot = 0; slot < p.duration_ms; slot += p.slot_ms) {
        for (const auto& id : fleet) {
            if (!fires(rng)) continue;
            FlowKey key{(192u << 24) | (168u << 16) | (host(rng) & 0xffff), (10u << 24) | host(rng),
                        static_cast<std::uint16_t>(port(rng)), static_cast<std::uint16_t>(port(rng)), 6};
            TimeMs t = std::min(slot + within(rng), p.duration_ms - 1);
            auto k = kind(rng) ? AlertKind::attack_attempt : AlertKind::anomaly;
            out.alerts.push_back({Alert{id, t, k, severity(rng), key, confidence(rng)}, false});
        }
    }
    std::stable_sort(out.alerts.begin(), out.alerts.end(), [](const LabeledAlert& a, const LabeledAlert& b) {
        return std::tie(a.alert.time_ms, a.alert.source) < std::tie(b.alert.time_ms, b.alert.source);
    });
    return out;
}

}  // namespace gnsm
