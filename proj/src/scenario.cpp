#include "gnsm/scenario.hpp"

#include "json_codec.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace gnsm {

using codec::json;

double TrafficProfile::multiplier_at(TimeMs t_ms) const noexcept {
    constexpr TimeMs kDay = 86'400'000;
    double hour = static_cast<double>(((t_ms % kDay) + kDay) % kDay) / 3'600'000.0;
    for (const auto& w : peak_hours) {
        if (hour >= w.from_h && hour < w.to_h) return peak_multiplier;
    }
    return 1.0;
}

TrafficProfile Scenario::profile_for(Site site) const {
    if (auto it = traffic.find(std::string(to_string(site))); it != traffic.end()) return it->second;
    if (auto it = traffic.find("default"); it != traffic.end()) return it->second;
    return TrafficProfile{};
}

std::vector<std::vector<SensorId>> Scenario::resolved_flow_lines() const {
    std::vector<std::vector<SensorId>> lines = flow_lines;
    std::set<SensorId> covered;
    for (const auto& line : flow_lines) covered.insert(line.begin(), line.end());
    for (const auto& s : sensors) {
        if (!covered.count(s.id)) lines.push_back({s.id});
    }
    return lines;
}

std::vector<DetectionRule> default_rules() {
    return parse_ruleset(
        "signature|cmd.exe|attack_attempt|5\n"
        "signature|/etc/passwd|attack_attempt|3\n"
        "threshold|2000000|60000|2\n");
}

void validate(const Scenario& s) {
    auto fail = [](const std::string& why) { return ValidationError("scenario: " + why); };
    if (s.duration_ms <= 0) throw fail("duration_ms must be > 0");
    if (s.capture_step_ms <= 0 || s.telemetry_interval_ms <= 0 || s.decision_interval_ms <= 0) {
        throw fail("step and interval lengths must be > 0");
    }
    if (s.control_latency_ms < 0) throw fail("control_latency_ms must be >= 0");
    if (s.sensors.empty()) throw fail("at least one sensor is required");
    std::set<SensorId> ids;
    for (const auto& sensor : s.sensors) {
        if (sensor.id.str() == "hub") throw fail("'hub' is reserved for the hub vertex");
        if (!ids.insert(sensor.id).second) throw fail("duplicate sensor " + sensor.id.str());
        if (sensor.capacity_bytes == 0) throw fail("sensor " + sensor.id.str() + " has zero capacity");
        if (sensor.initial_used_bytes > sensor.capacity_bytes) throw fail("sensor " + sensor.id.str() + " starts over capacity");
    }
    auto known = [&](const SensorId& id) { return ids.count(id) != 0; };
    for (const auto& e : s.edges) {
        for (const auto* end : {&e.a, &e.b}) {
            if (end->str() != "hub" && !known(*end)) throw fail("edge references unknown sensor " + end->str());
        }
        if (e.a == e.b) throw fail("self-loop on " + e.a.str());
        if (e.hop_weight <= 0) throw fail("hop_weight must be > 0");
        if (!(e.utilization >= 0.0 && e.utilization <= 1.0)) throw fail("utilization outside [0,1]");
    }
    std::set<SensorId> on_line;
    for (const auto& line : s.flow_lines) {
        if (line.empty()) throw fail("empty flow line");
        for (const auto& id : line) {
            if (!known(id)) throw fail("flow line references unknown sensor " + id.str());
            if (!on_line.insert(id).second) throw fail("sensor " + id.str() + " is on two flow lines");
        }
    }
    for (const auto& [site, p] : s.traffic) {
        if (site != "default") parse_site(site);
        if (!(p.sessions_per_sec >= 0.0) || !(p.mean_session_bytes >= 1.0) || !(p.peak_multiplier >= 0.0)) {
            throw fail("invalid traffic profile for " + site);
        }
    }
    if (!(s.nic_noise_rate >= 0.0 && s.nic_noise_rate <= 1.0)) throw fail("nic_noise_rate outside [0,1]");
    for (const auto& r : s.rules) validate(r);
    std::set<std::string> event_ids;
    for (const auto& ev : s.events) {
        if (!event_ids.insert(ev.id).second) throw fail("duplicate event id " + ev.id);
        if (ev.at_ms < 0 || ev.duration_ms <= 0) throw fail("event " + ev.id + " has an invalid time span");
        if (ev.sensors.empty()) throw fail("event " + ev.id + " targets no sensor");
        for (const auto& id : ev.sensors) {
            if (!known(id)) throw fail("event " + ev.id + " references unknown sensor " + id.str());
        }
        if (ev.payload.size() > kMaxPstrExcerpt || !is_printable(ev.payload)) throw fail("event payload not a valid excerpt");
        if (!(ev.bytes_per_sec > 0.0)) throw fail("event bytes_per_sec must be > 0");
    }
    if (s.latency_min_ms < 0 || s.latency_max_ms > kMaxTransitionLatencyMs || s.latency_min_ms > s.latency_max_ms) {
        throw fail("transition latency bounds must satisfy 0 <= min <= max <= 35000");
    }
    validate(s.energy);
    if (s.hub.quiet_period_ms <= 0) throw fail("quiet_period_ms must be > 0");
    if (!(s.hub.alpha >= 0.0)) throw fail("alpha must be >= 0");
    if (!(s.hub.storage_ceiling > 0.0 && s.hub.storage_ceiling <= 1.0)) throw fail("storage_ceiling outside (0,1]");
    if (!(s.hub.weight_decay >= 0.0 && s.hub.weight_decay <= 1.0)) throw fail("weight_decay outside [0,1]");
    validate(s.pooling);
    validate(s.ga.params);
    if (s.ga.interval_ms <= 0) throw fail("ga interval must be > 0");
    for (const auto& w : s.upload.windows_h) {
        if (!(w.from_h >= 0.0 && w.from_h < w.to_h && w.to_h <= 24.0)) throw fail("upload window outside one day");
    }
    for (std::size_t i = 1; i < s.upload.windows_h.size(); ++i) {
        if (s.upload.windows_h[i].from_h < s.upload.windows_h[i - 1].to_h) throw fail("upload windows overlap");
    }
    if (!(s.storage.pressure_threshold > 0.0 && s.storage.pressure_threshold <= 1.0)) {
        throw fail("pressure_threshold outside (0,1]");
    }
    const auto& v = s.storage.volume;
    if (!(v.flow_share >= 0.0 && v.pstr_share >= 0.0 && v.flow_share + v.pstr_share <= 1.0)) {
        throw fail("volume shares must be >= 0 and sum to at most 1");
    }
}

namespace {

std::uint32_t parse_address(const json& j) {
    if (j.is_number_unsigned()) {
        auto v = j.get<std::uint64_t>();
        if (v > 0xffffffffULL) throw ValidationError("address out of range");
        return static_cast<std::uint32_t>(v);
    }
    auto text = j.get<std::string>();
    unsigned a = 0, b = 0, c = 0, d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4 || a > 255 || b > 255 || c > 255 ||
        d > 255) {
        throw ValidationError("bad IPv4 address '" + text + "'");
    }
    return (a << 24) | (b << 16) | (c << 8) | d;
}

std::string dotted(std::uint32_t a) {
    return fmt::format("{}.{}.{}.{}", (a >> 24) & 0xff, (a >> 16) & 0xff, (a >> 8) & 0xff, a & 0xff);
}

FlowKey flow_from(const json& j) {
    FlowKey k;
    k.src_addr = parse_address(j.at("src"));
    k.dst_addr = parse_address(j.at("dst"));
    auto port = [&](const char* key) {
        auto v = j.value(key, 0);
        if (v < 0 || v > 65535) throw ValidationError(std::string(key) + " out of range");
        return static_cast<std::uint16_t>(v);
    };
    k.src_port = port("sport");
    k.dst_port = port("dport");
    auto proto = j.value("proto", 6);
    if (proto < 0 || proto > 255) throw ValidationError("proto out of range");
    k.protocol = static_cast<std::uint8_t>(proto);
    return k;
}

json flow_to(const FlowKey& k) {
    return json{{"dport", k.dst_port}, {"dst", dotted(k.dst_addr)}, {"proto", k.protocol},
                {"sport", k.src_port}, {"src", dotted(k.src_addr)}};
}

std::vector<HourWindow> windows_from(const json& j) {
    std::vector<HourWindow> out;
    for (const auto& w : j) {
        if (!w.is_array() || w.size() != 2) throw ValidationError("hour window must be [from_h, to_h]");
        out.push_back({w[0].get<double>(), w[1].get<double>()});
    }
    return out;
}

json windows_to(const std::vector<HourWindow>& ws) {
    json out = json::array();
    for (const auto& w : ws) out.push_back(json::array({w.from_h, w.to_h}));
    return out;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

}  // namespace

Scenario scenario_from_json(std::string_view text) {
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError("scenario is not a JSON object");
    Scenario s;
    try {
        reject_unknown(j,
                       {"seed", "duration_ms", "capture_step_ms", "telemetry_interval_ms", "decision_interval_ms",
                        "control_latency_ms", "role_management", "sensors", "edges", "flow_lines", "traffic",
                        "nic_noise_rate", "rules", "events", "transition_latency_ms", "energy", "hub", "pooling", "ga",
                        "upload", "storage", "description"},
                       "scenario");
        read(j, "seed", s.seed);
        read(j, "duration_ms", s.duration_ms);
        read(j, "capture_step_ms", s.capture_step_ms);
        read(j, "telemetry_interval_ms", s.telemetry_interval_ms);
        read(j, "decision_interval_ms", s.decision_interval_ms);
        read(j, "control_latency_ms", s.control_latency_ms);
        if (j.contains("role_management")) {
            auto rm = j.at("role_management").get<std::string>();
            if (rm == "hub") {
                s.role_management = RoleManagement::hub;
            } else if (rm == "pinned_full") {
                s.role_management = RoleManagement::pinned_full;
            } else {
                throw ValidationError("role_management must be 'hub' or 'pinned_full'");
            }
        }
        for (const auto& js : j.at("sensors")) {
            reject_unknown(js, {"id", "site", "capacity_bytes", "initial_used_bytes"}, "sensor");
            SensorSpec spec;
            spec.id = SensorId(js.at("id").get<std::string>());
            spec.site = parse_site(js.value("site", std::string("plant")));
            read(js, "capacity_bytes", spec.capacity_bytes);
            read(js, "initial_used_bytes", spec.initial_used_bytes);
            s.sensors.push_back(std::move(spec));
        }
        if (j.contains("edges")) {
            for (const auto& je : j.at("edges")) {
                reject_unknown(je, {"a", "b", "hop_weight", "utilization"}, "edge");
                EdgeSpec e{SensorId(je.at("a").get<std::string>()), SensorId(je.at("b").get<std::string>())};
                read(je, "hop_weight", e.hop_weight);
                read(je, "utilization", e.utilization);
                s.edges.push_back(std::move(e));
            }
        }
        if (j.contains("flow_lines")) {
            for (const auto& jl : j.at("flow_lines")) {
                std::vector<SensorId> line;
                for (const auto& id : jl) line.emplace_back(id.get<std::string>());
                s.flow_lines.push_back(std::move(line));
            }
        }
        if (j.contains("traffic")) {
            for (const auto& [site, jp] : j.at("traffic").items()) {
                reject_unknown(jp, {"sessions_per_sec", "mean_session_bytes", "peak_multiplier", "peak_hours"}, "traffic");
                TrafficProfile p;
                read(jp, "sessions_per_sec", p.sessions_per_sec);
                read(jp, "mean_session_bytes", p.mean_session_bytes);
                read(jp, "peak_multiplier", p.peak_multiplier);
                if (jp.contains("peak_hours")) p.peak_hours = windows_from(jp.at("peak_hours"));
                s.traffic[site] = std::move(p);
            }
        }
        read(j, "nic_noise_rate", s.nic_noise_rate);
        if (j.contains("rules")) {
            std::string joined;
            for (const auto& r : j.at("rules")) joined += r.get<std::string>() + "\n";
            s.rules = parse_ruleset(joined);
        } else {
            s.rules = default_rules();
        }
        if (j.contains("events")) {
            for (const auto& jev : j.at("events")) {
                reject_unknown(jev, {"id", "at_ms", "duration_ms", "kind", "sensors", "flow", "payload", "bytes_per_sec"},
                               "event");
                InjectedEvent ev;
                ev.id = jev.at("id").get<std::string>();
                ev.at_ms = jev.at("at_ms").get<TimeMs>();
                read(jev, "duration_ms", ev.duration_ms);
                ev.kind = parse_alert_kind(jev.value("kind", std::string("attack_attempt")));
                for (const auto& id : jev.at("sensors")) ev.sensors.emplace_back(id.get<std::string>());
                ev.key = flow_from(jev.at("flow"));
                read(jev, "payload", ev.payload);
                read(jev, "bytes_per_sec", ev.bytes_per_sec);
                s.events.push_back(std::move(ev));
            }
        }
        if (j.contains("transition_latency_ms")) {
            const auto& jl = j.at("transition_latency_ms");
            reject_unknown(jl, {"min", "max"}, "transition_latency_ms");
            read(jl, "min", s.latency_min_ms);
            read(jl, "max", s.latency_max_ms);
        }
        if (j.contains("energy")) {
            const auto& je = j.at("energy");
            reject_unknown(je, {"collection_w", "half_w", "full_w", "legacy_sensor_w", "infrastructure_w", "co2_mg_per_kwh"},
                           "energy");
            read(je, "collection_w", s.energy.collection_w);
            read(je, "half_w", s.energy.half_w);
            read(je, "full_w", s.energy.full_w);
            read(je, "legacy_sensor_w", s.energy.legacy_sensor_w);
            read(je, "infrastructure_w", s.energy.infrastructure_w);
            read(je, "co2_mg_per_kwh", s.energy.co2_mg_per_kwh);
        }
        if (j.contains("hub")) {
            const auto& jh = j.at("hub");
            reject_unknown(jh, {"quiet_period_ms", "power_save_floor", "alpha", "storage_ceiling", "weight_decay"}, "hub");
            read(jh, "quiet_period_ms", s.hub.quiet_period_ms);
            if (jh.contains("power_save_floor")) s.hub.power_save_floor = parse_role(jh.at("power_save_floor").get<std::string>());
            read(jh, "alpha", s.hub.alpha);
            read(jh, "storage_ceiling", s.hub.storage_ceiling);
            read(jh, "weight_decay", s.hub.weight_decay);
        }
        if (j.contains("pooling")) {
            const auto& jp = j.at("pooling");
            reject_unknown(jp, {"window_ms", "quorum", "severity_gate"}, "pooling");
            read(jp, "window_ms", s.pooling.window_ms);
            read(jp, "quorum", s.pooling.quorum);
            if (jp.contains("severity_gate")) {
                if (jp.at("severity_gate").is_null()) {
                    s.pooling.severity_gate.reset();
                } else {
                    s.pooling.severity_gate = jp.at("severity_gate").get<int>();
                }
            }
        }
        if (j.contains("ga")) {
            const auto& jg = j.at("ga");
            reject_unknown(jg, {"pop_size", "crossover_rate", "mutation_rate", "elitism_count", "interval_ms"}, "ga");
            read(jg, "pop_size", s.ga.params.pop_size);
            read(jg, "crossover_rate", s.ga.params.crossover_rate);
            read(jg, "mutation_rate", s.ga.params.mutation_rate);
            read(jg, "elitism_count", s.ga.params.elitism_count);
            read(jg, "interval_ms", s.ga.interval_ms);
        }
        if (j.contains("upload")) {
            const auto& ju = j.at("upload");
            reject_unknown(ju, {"windows_h", "max_bytes_per_window"}, "upload");
            if (ju.contains("windows_h")) s.upload.windows_h = windows_from(ju.at("windows_h"));
            read(ju, "max_bytes_per_window", s.upload.max_bytes_per_window);
        }
        if (j.contains("storage")) {
            const auto& jst = j.at("storage");
            reject_unknown(jst, {"pressure_threshold", "flow_share", "pstr_share"}, "storage");
            read(jst, "pressure_threshold", s.storage.pressure_threshold);
            read(jst, "flow_share", s.storage.volume.flow_share);
            read(jst, "pstr_share", s.storage.volume.pstr_share);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read scenario " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    json sensors = json::array();
    for (const auto& x : s.sensors) {
        sensors.push_back(json{{"capacity_bytes", x.capacity_bytes}, {"id", x.id.str()},
                               {"initial_used_bytes", x.initial_used_bytes}, {"site", std::string(to_string(x.site))}});
    }
    json edges = json::array();
    for (const auto& e : s.edges) {
        edges.push_back(json{{"a", e.a.str()}, {"b", e.b.str()}, {"hop_weight", e.hop_weight}, {"utilization", e.utilization}});
    }
    json lines = json::array();
    for (const auto& line : s.flow_lines) {
        json l = json::array();
        for (const auto& id : line) l.push_back(id.str());
        lines.push_back(l);
    }
    json traffic = json::object();
    for (const auto& [site, p] : s.traffic) {
        traffic[site] = json{{"mean_session_bytes", p.mean_session_bytes}, {"peak_hours", windows_to(p.peak_hours)},
                             {"peak_multiplier", p.peak_multiplier}, {"sessions_per_sec", p.sessions_per_sec}};
    }
    json rules = json::array();
    for (const auto& r : s.rules) rules.push_back(format_rule(r));
    json events = json::array();
    for (const auto& ev : s.events) {
        json ids = json::array();
        for (const auto& id : ev.sensors) ids.push_back(id.str());
        events.push_back(json{{"at_ms", ev.at_ms}, {"bytes_per_sec", ev.bytes_per_sec}, {"duration_ms", ev.duration_ms},
                              {"flow", flow_to(ev.key)}, {"id", ev.id}, {"kind", std::string(to_string(ev.kind))},
                              {"payload", ev.payload}, {"sensors", ids}});
    }
    json j{
        {"seed", s.seed},
        {"duration_ms", s.duration_ms},
        {"capture_step_ms", s.capture_step_ms},
        {"telemetry_interval_ms", s.telemetry_interval_ms},
        {"decision_interval_ms", s.decision_interval_ms},
        {"control_latency_ms", s.control_latency_ms},
        {"role_management", s.role_management == RoleManagement::hub ? "hub" : "pinned_full"},
        {"sensors", sensors},
        {"edges", edges},
        {"flow_lines", lines},
        {"traffic", traffic},
        {"nic_noise_rate", s.nic_noise_rate},
        {"rules", rules},
        {"events", events},
        {"transition_latency_ms", {{"min", s.latency_min_ms}, {"max", s.latency_max_ms}}},
        {"energy",
         {{"collection_w", s.energy.collection_w},
          {"half_w", s.energy.half_w},
          {"full_w", s.energy.full_w},
          {"legacy_sensor_w", s.energy.legacy_sensor_w},
          {"infrastructure_w", s.energy.infrastructure_w},
          {"co2_mg_per_kwh", s.energy.co2_mg_per_kwh}}},
        {"hub",
         {{"quiet_period_ms", s.hub.quiet_period_ms},
          {"power_save_floor", std::string(to_string(s.hub.power_save_floor))},
          {"alpha", s.hub.alpha},
          {"storage_ceiling", s.hub.storage_ceiling},
          {"weight_decay", s.hub.weight_decay}}},
        {"pooling",
         {{"window_ms", s.pooling.window_ms},
          {"quorum", s.pooling.quorum},
          {"severity_gate", s.pooling.severity_gate ? json(*s.pooling.severity_gate) : json(nullptr)}}},
        {"ga",
         {{"pop_size", s.ga.params.pop_size},
          {"crossover_rate", s.ga.params.crossover_rate},
          {"mutation_rate", s.ga.params.mutation_rate},
          {"elitism_count", s.ga.params.elitism_count},
          {"interval_ms", s.ga.interval_ms}}},
        {"upload", {{"windows_h", windows_to(s.upload.windows_h)}, {"max_bytes_per_window", s.upload.max_bytes_per_window}}},
        {"storage",
         {{"pressure_threshold", s.storage.pressure_threshold},
          {"flow_share", s.storage.volume.flow_share},
          {"pstr_share", s.storage.volume.pstr_share}}},
    };
    return j.dump(2) + "\n";
}

Scenario make_fleet_scenario(std::uint64_t seed, TimeMs duration_ms, std::size_t attacks) {
    Scenario s;
    s.seed = seed;
    s.duration_ms = duration_ms;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> util_pct(0, 80);

    const std::pair<Site, int> layout[] = {{Site::plant, 7},    {Site::sales, 2},    {Site::server_room, 3},
                                           {Site::branch_1, 1}, {Site::branch_2, 1}, {Site::branch_3, 1}};
    int n = 0;
    for (const auto& [site, count] : layout) {
        SensorId gateway;
        for (int i = 0; i < count; ++i) {
            SensorSpec spec;
            spec.id = SensorId(fmt::format("s{:02}", ++n));
            spec.site = site;
            s.sensors.push_back(spec);
            auto util = util_pct(rng) / 100.0;
            if (i == 0) {
                gateway = spec.id;
                int hops = (site == Site::branch_1 || site == Site::branch_2 || site == Site::branch_3) ? 3 : 1;
                s.edges.push_back({spec.id, SensorId("hub"), hops, util});
            } else {
                s.edges.push_back({gateway, spec.id, 1, util});
                if (i >= 2) s.edges.push_back({s.sensors[s.sensors.size() - 2].id, spec.id, 1, util_pct(rng) / 100.0});
            }
        }
    }
    // Two plant sensors small enough to run into storage pressure.
    s.sensors[4].capacity_bytes = 20'000'000'000ULL;
    s.sensors[4].initial_used_bytes = 16'400'000'000ULL;
    s.sensors[5].capacity_bytes = 20'000'000'000ULL;
    s.sensors[5].initial_used_bytes = 12'000'000'000ULL;

    s.flow_lines = {{SensorId("s01"), SensorId("s02")}, {SensorId("s10"), SensorId("s11")}};
    s.traffic["default"] = TrafficProfile{};
    s.traffic["server-room"] = TrafficProfile{0.04, 8.0e6, 2.0, {{8.0, 9.5}, {13.5, 14.5}}};
    s.traffic["branch-1"] = TrafficProfile{0.01, 3.0e6, 3.0, {{8.0, 9.5}, {13.5, 14.5}}};
    s.traffic["branch-2"] = s.traffic["branch-1"];
    s.traffic["branch-3"] = s.traffic["branch-1"];
    s.nic_noise_rate = 0.002;
    s.rules = default_rules();
    s.hub.power_save_floor = SensorRole::half_cycle;
    s.pooling.window_ms = 120'000;

    std::uniform_int_distribution<TimeMs> when(0, std::max<TimeMs>(duration_ms - 600'000, 1));
    std::uniform_int_distribution<std::uint32_t> host(1, 254);
    const std::vector<std::vector<SensorId>> witnesses = {
        {SensorId("s01"), SensorId("s02")}, {SensorId("s10"), SensorId("s11")}, {SensorId("s03"), SensorId("s04")}};
    for (std::size_t i = 0; i < attacks; ++i) {
        InjectedEvent ev;
        ev.id = fmt::format("attack-{}", i + 1);
        ev.at_ms = when(rng);
        ev.duration_ms = 300'000;
        ev.kind = AlertKind::attack_attempt;
        ev.sensors = witnesses[i % witnesses.size()];
        ev.key = FlowKey{(203u << 24) | (0u << 16) | (113u << 8) | host(rng), (10u << 24) | host(rng), 40000, 80, 6};
        s.events.push_back(std::move(ev));
    }
    validate(s);
    return s;
}

}  // namespace gnsm
