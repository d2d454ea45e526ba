#include <doctest.h>

#include "gnsm/scenario.hpp"
#include "gnsm/simulator.hpp"
#include "test_support.hpp"

#include <json.hpp>

using namespace testsupport;
using nlohmann::json;

namespace {

TopologyGraph line_topology(const std::vector<SensorId>& ids) {
    TopologyGraph g;
    for (const auto& id : ids) g.add_vertex(id);
    return g;
}

// Packets whose time lies in the intersection of every sensor's windows.
std::uint64_t intersection_oracle(const std::vector<SensorId>& line, const std::map<SensorId, std::vector<Interval>>& tr,
                                  const std::vector<TimeMs>& packets) {
    std::uint64_t n = 0;
    for (auto t : packets) {
        bool all = true;
        for (const auto& id : line) {
            bool in = false;
            auto it = tr.find(id);
            if (it != tr.end()) {
                for (const auto& w : it->second) in = in || (w.start_ms <= t && t < w.end_ms);
            }
            all = all && in;
        }
        if (all) ++n;
    }
    return n;
}

Scenario two_sensor_attack() {
    Scenario s;
    s.seed = 9;
    s.duration_ms = 3'600'000;
    s.sensors = {{sid("a"), Site::plant}, {sid("b"), Site::plant}};
    s.edges = {{sid("a"), sid("hub"), 1, 0.1}, {sid("a"), sid("b"), 1, 0.1}};
    s.flow_lines = {{sid("a"), sid("b")}};
    s.traffic["default"] = TrafficProfile{0.01, 2e6, 2.0, {{8.0, 9.5}}};
    s.rules = default_rules();
    s.pooling = PoolParams{120'000, 2, std::nullopt};
    s.hub.power_save_floor = SensorRole::half_cycle;
    InjectedEvent ev;
    ev.id = "atk";
    ev.at_ms = 1'200'000;
    ev.duration_ms = 300'000;
    ev.sensors = {sid("a"), sid("b")};
    ev.key = FlowKey{(203u << 24) | 5u, (10u << 24) | 7u, 4444, 80, 6};
    s.events = {ev};
    return s;
}

FlowKey flow_of(const json& j) {
    return FlowKey{j.at("src").get<std::uint32_t>(), j.at("dst").get<std::uint32_t>(), j.at("sport").get<std::uint16_t>(),
                   j.at("dport").get<std::uint16_t>(), j.at("proto").get<std::uint8_t>()};
}

struct LogOracle {
    std::uint64_t raw = 0, raw_true = 0, confirmed = 0, confirmed_true = 0, injected = 0, detected = 0;
    std::int64_t energy_uwms = 0;
};

// Reads the log with a plain JSON parser and redoes the ground-truth
// bookkeeping by direct enumeration.
LogOracle recompute(const std::vector<std::string>& log) {
    struct Truth {
        TimeMs at, dur;
        FlowKey key;
    };
    std::vector<Truth> truth;
    std::vector<std::pair<FlowKey, TimeMs>> raw;
    std::vector<std::tuple<FlowKey, TimeMs, TimeMs>> confirmed;
    TimeMs slack = 0;
    std::map<std::string, double> watts;
    LogOracle o;
    for (const auto& line : log) {
        auto j = json::parse(line);
        const auto& b = j.at("body");
        if (j.at("t") == "TEL") {
            for (const auto& a : b.at("alerts")) raw.emplace_back(flow_of(a.at("flow")), a.at("time").get<TimeMs>());
        } else if (j.at("t") == "SIM") {
            auto kind = b.at("kind").get<std::string>();
            if (kind == "start") {
                slack = b.at("slack").get<TimeMs>();
                const auto& e = b.at("energy");
                watts = {{"collection", e.at("collection_w")}, {"half", e.at("half_w")}, {"full", e.at("full_w")}};
            } else if (kind == "inject") {
                truth.push_back({b.at("at").get<TimeMs>(), b.at("duration").get<TimeMs>(), flow_of(b.at("flow"))});
            } else if (kind == "confirmed") {
                confirmed.emplace_back(flow_of(b.at("flow")), b.at("first").get<TimeMs>(), b.at("last").get<TimeMs>());
            } else if (kind == "energy") {
                auto w = watts.at(b.at("role").get<std::string>());
                o.energy_uwms += std::llround(w * 1e6) * (b.at("to").get<TimeMs>() - b.at("from").get<TimeMs>());
            }
        }
    }
    o.injected = truth.size();
    o.raw = raw.size();
    for (const auto& [k, t] : raw) {
        for (const auto& ev : truth) {
            if (k == ev.key && t >= ev.at && t <= ev.at + ev.dur + slack) {
                ++o.raw_true;
                break;
            }
        }
    }
    std::set<std::size_t> hit;
    o.confirmed = confirmed.size();
    for (const auto& [k, first, last] : confirmed) {
        bool any = false;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const auto& ev = truth[i];
            if (k == ev.key && first <= ev.at + ev.dur + slack && last >= ev.at) {
                any = true;
                hit.insert(i);
            }
        }
        if (any) ++o.confirmed_true;
    }
    o.detected = hit.size();
    return o;
}

}  // namespace

TEST_CASE("coverage: disjoint windows on a two-sensor line drop nothing") {
    std::vector<SensorId> line{sid("a"), sid("b")};
    std::map<SensorId, std::vector<Interval>> tr{{sid("a"), {{0, 35'000}}}, {sid("b"), {{35'000, 70'000}}}};
    std::vector<TimeMs> packets;
    for (TimeMs t = 0; t < 100'000; t += 10) packets.push_back(t);
    CHECK(flow_line_backup_coverage(line_topology(line), line, tr, packets) == 0);
}

TEST_CASE("coverage: a lone sensor in transition drops the whole burst") {
    std::vector<SensorId> line{sid("a")};
    std::map<SensorId, std::vector<Interval>> tr{{sid("a"), {{0, 35'000}}}};
    std::vector<TimeMs> packets;
    for (TimeMs t = 0; t < 35'000; t += 7) packets.push_back(t);
    CHECK(flow_line_backup_coverage(line_topology(line), line, tr, packets) == packets.size());
}

TEST_CASE("coverage: 10 s overlap drops only the packets inside it") {
    std::vector<SensorId> line{sid("a"), sid("b")};
    std::map<SensorId, std::vector<Interval>> tr{{sid("a"), {{0, 30'000}}}, {sid("b"), {{20'000, 50'000}}}};
    std::vector<TimeMs> packets;
    for (TimeMs t = 0; t < 60'000; t += 1) packets.push_back(t);
    auto dropped = flow_line_backup_coverage(line_topology(line), line, tr, packets);
    CHECK(dropped == 10'000);
    CHECK(dropped == intersection_oracle(line, tr, packets));
}

TEST_CASE("coverage: random lines agree with the intersection oracle") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<SensorId> line;
        for (int i = 0, n = std::uniform_int_distribution<int>(1, 4)(rng); i < n; ++i) line.push_back(sid(fmt::format("s{}", i)));
        std::map<SensorId, std::vector<Interval>> tr;
        for (const auto& id : line) {
            if (std::bernoulli_distribution(0.1)(rng)) continue;
            for (int k = std::uniform_int_distribution<int>(0, 3)(rng); k > 0; --k) {
                TimeMs start = std::uniform_int_distribution<TimeMs>(0, 100'000)(rng);
                tr[id].push_back({start, start + std::uniform_int_distribution<TimeMs>(0, 35'000)(rng)});
            }
        }
        std::vector<TimeMs> packets;
        for (int k = std::uniform_int_distribution<int>(0, 500)(rng); k > 0; --k) {
            packets.push_back(std::uniform_int_distribution<TimeMs>(0, 140'000)(rng));
        }
        CHECK(flow_line_backup_coverage(line_topology(line), line, tr, packets) == intersection_oracle(line, tr, packets));
    }
}

TEST_CASE("coverage: invalid lines") {
    TopologyGraph g;
    g.add_vertex(sid("a"));
    std::vector<SensorId> empty;
    std::vector<SensorId> ghost{sid("ghost")};
    CHECK_THROWS_AS(flow_line_backup_coverage(g, empty, {}, {}), ValidationError);
    CHECK_THROWS_AS(flow_line_backup_coverage(g, ghost, {}, {}), ValidationError);
}

TEST_CASE("run: a silent scenario has zero traffic and zero alerts") {
    auto s = two_sensor_attack();
    s.events.clear();
    s.traffic["default"].sessions_per_sec = 0.0;
    s.duration_ms = 1;
    auto r = run(s);
    CHECK(r.report.sessions_offered == 0);
    CHECK(r.report.packets_offered == 0);
    CHECK(r.report.alerts_raw == 0);
    CHECK(r.report.alerts_confirmed == 0);
    CHECK_FALSE(r.report.recall.has_value());
    CHECK_FALSE(r.report.precision_raw.has_value());
    CHECK(build_report_from_log(r.log) == r.report);
}

TEST_CASE("run: invalid scenario fails before any event") {
    auto s = two_sensor_attack();
    s.duration_ms = 0;
    CHECK_THROWS_AS(run(s), ValidationError);
    s = two_sensor_attack();
    s.events[0].sensors.push_back(sid("zz"));
    CHECK_THROWS_AS(run(s), ValidationError);
}

TEST_CASE("run: one injected attack seen by two sensors is recalled") {
    auto r = run(two_sensor_attack());
    CHECK(r.report.events_injected == 1);
    REQUIRE(r.report.recall.has_value());
    CHECK(*r.report.recall == 1.0);
    CHECK(r.report.alerts_confirmed_true >= 1);
}

TEST_CASE("run: identical inputs give identical logs") {
    auto s = make_fleet_scenario(4, 6 * 3'600'000, 2);
    auto a = run(s);
    auto b = run(s);
    CHECK(a.log == b.log);
    CHECK(a.report.log_sha256 == b.report.log_sha256);
    CHECK(a.report.log_sha256 == log_sha256(a.log));
    s.seed = 5;
    CHECK(run(s).report.log_sha256 != a.report.log_sha256);
}

TEST_CASE("run: the report is recomputed exactly from the log") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto s = make_fleet_scenario(seed, 4 * 3'600'000, 2);
        auto r = run(s);
        CHECK(build_report_from_log(r.log) == r.report);
        s.role_management = RoleManagement::pinned_full;
        auto p = run(s);
        CHECK(build_report_from_log(p.log) == p.report);
    }
}

TEST_CASE("run: without the log the aggregates are unchanged") {
    auto s = make_fleet_scenario(6, 4 * 3'600'000, 2);
    auto full = run(s);
    auto lean = run(s, SimOptions{false});
    CHECK(lean.log.empty());
    CHECK(lean.report.log_sha256.empty());
    lean.report.log_sha256 = full.report.log_sha256;
    CHECK(lean.report == full.report);
}

TEST_CASE("run: precision and recall match a brute-force recomputation") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto r = run(make_fleet_scenario(seed, 8 * 3'600'000, 3));
        auto o = recompute(r.log);
        CHECK(o.raw == r.report.alerts_raw);
        CHECK(o.raw_true == r.report.alerts_raw_true);
        CHECK(o.confirmed == r.report.alerts_confirmed);
        CHECK(o.confirmed_true == r.report.alerts_confirmed_true);
        CHECK(o.injected == r.report.events_injected);
        CHECK(o.detected == r.report.events_detected);
        if (o.raw > 0) CHECK(*r.report.precision_raw == doctest::Approx(static_cast<double>(o.raw_true) / o.raw));
        if (o.confirmed > 0) {
            CHECK(*r.report.precision_confirmed == doctest::Approx(static_cast<double>(o.confirmed_true) / o.confirmed));
        }
        if (o.injected > 0) CHECK(*r.report.recall == doctest::Approx(static_cast<double>(o.detected) / o.injected));
    }
}

TEST_CASE("run: fleet energy is the exact sum of per-node intervals") {
    auto r = run(make_fleet_scenario(21, 12 * 3'600'000, 2));
    std::int64_t sum = 0;
    for (const auto& [id, uwms] : r.report.node_uwms) sum += uwms;
    CHECK(sum == r.report.fleet_uwms);
    CHECK(recompute(r.log).energy_uwms == r.report.fleet_uwms);
    CHECK(r.report.node_uwms.size() == 15);

    // The step function of fleet draw integrates to the same total.
    const auto& tl = r.report.power_timeline_uw;
    REQUIRE(!tl.empty());
    std::int64_t integral = 0;
    for (std::size_t i = 0; i < tl.size(); ++i) {
        TimeMs end = i + 1 < tl.size() ? tl[i + 1].first : r.report.duration_ms;
        integral += tl[i].second * (end - tl[i].first);
    }
    CHECK(integral == r.report.fleet_uwms);
}

TEST_CASE("run: pinned full cycle draws full power all day") {
    auto s = make_fleet_scenario(2, 3'600'000, 1);
    s.role_management = RoleManagement::pinned_full;
    auto r = run(s);
    CHECK(r.report.transitions == 0);
    CHECK(r.report.fleet_uwms == 15LL * 1'500'000 * 3'600'000);
}

TEST_CASE("run: hub management never uses more energy than pinned full cycle") {
    for (std::uint64_t seed = 30; seed < 34; ++seed) {
        auto s = make_fleet_scenario(seed, 6 * 3'600'000, 2);
        auto hub = run(s, SimOptions{false});
        s.role_management = RoleManagement::pinned_full;
        auto full = run(s, SimOptions{false});
        CHECK(hub.report.fleet_uwms <= full.report.fleet_uwms);
        if (hub.report.power_save_signals > 0) CHECK(hub.report.fleet_uwms < full.report.fleet_uwms);
    }
}

TEST_CASE("run: transitions respect the configured latency bounds") {
    auto s = make_fleet_scenario(8, 6 * 3'600'000, 2);
    s.latency_min_ms = 1000;
    s.latency_max_ms = 2000;
    auto r = run(s);
    REQUIRE(!r.transitions.empty());
    for (const auto& t : r.transitions) {
        CHECK(t.drop_length() >= 0);
        CHECK(t.drop_length() <= 2000);
        CHECK(t.drop_start_ms >= t.requested_at);
    }
}
