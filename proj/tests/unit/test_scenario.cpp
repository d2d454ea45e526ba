#include <doctest.h>

#include "gnsm/scenario.hpp"
#include "test_support.hpp"

using namespace testsupport;

namespace {

const char* kMinimal = R"({
  "seed": 3,
  "duration_ms": 600000,
  "sensors": [{"id": "a", "site": "plant"}, {"id": "b", "site": "sales"}],
  "edges": [{"a": "a", "b": "hub", "hop_weight": 1, "utilization": 0.1},
            {"a": "a", "b": "b", "hop_weight": 2, "utilization": 0.0}],
  "flow_lines": [["a", "b"]],
  "events": [{"id": "e1", "at_ms": 60000, "duration_ms": 30000, "kind": "attack_attempt",
              "sensors": ["a", "b"], "flow": {"src": "203.0.113.5", "dst": "10.0.0.1", "sport": 4444, "dport": 80}}],
  "pooling": {"window_ms": 120000, "quorum": 2, "severity_gate": null}
})";

}  // namespace

TEST_CASE("scenario: minimal file parses with defaults") {
    auto s = scenario_from_json(kMinimal);
    CHECK(s.seed == 3);
    CHECK(s.sensors.size() == 2);
    CHECK(s.sensors[1].site == Site::sales);
    CHECK(s.rules == default_rules());
    CHECK_FALSE(s.pooling.severity_gate.has_value());
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0].key.src_addr == ((203u << 24) | (113u << 8) | 5u));
    CHECK(s.events[0].key.protocol == 6);
    CHECK(s.latency_max_ms == 35'000);
}

TEST_CASE("scenario: JSON round trip") {
    auto s = scenario_from_json(kMinimal);
    auto text = scenario_to_json(s);
    CHECK(scenario_to_json(scenario_from_json(text)) == text);
    auto fleet = make_fleet_scenario(5, 3'600'000, 3);
    auto fleet_text = scenario_to_json(fleet);
    CHECK(scenario_to_json(scenario_from_json(fleet_text)) == fleet_text);
}

TEST_CASE("scenario: unknown keys are rejected at every level") {
    std::string text = kMinimal;
    auto top = text;
    top.insert(1, "\"sede\": 1,");
    CHECK_THROWS_AS(scenario_from_json(top), ValidationError);
    auto nested = text;
    nested.replace(nested.find("\"site\": \"plant\""), 15, "\"sight\": \"plant\"");
    CHECK_THROWS_AS(scenario_from_json(nested), ValidationError);
}

TEST_CASE("scenario: invariants") {
    auto base = scenario_from_json(kMinimal);
    auto bad = base;
    bad.duration_ms = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = base;
    bad.events[0].sensors.push_back(sid("zz"));
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = base;
    bad.sensors.push_back({sid("a"), Site::plant});
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = base;
    bad.sensors.push_back({sid("hub"), Site::plant});
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = base;
    bad.latency_max_ms = 35'001;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = base;
    bad.flow_lines.push_back({sid("a")});
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = base;
    bad.edges.push_back({sid("a"), sid("ghost"), 1, 0.0});
    CHECK_THROWS_AS(validate(bad), ValidationError);
    CHECK_THROWS_AS(scenario_from_json("[]"), ValidationError);
    CHECK_THROWS_AS(scenario_from_json("{\"sensors\": 5}"), ValidationError);
    CHECK_THROWS_AS(scenario_from_json("{"), ValidationError);
}

TEST_CASE("scenario: missing file is not a validation error") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), std::runtime_error);
    try {
        load_scenario("/nonexistent/scenario.json");
    } catch (const ValidationError&) {
        FAIL("missing file reported as invalid");
    } catch (const std::runtime_error&) {
    }
}

TEST_CASE("traffic profile: peak hours apply every day") {
    TrafficProfile p;
    CHECK(p.multiplier_at(0) == 1.0);
    CHECK(p.multiplier_at(8 * 3'600'000) == p.peak_multiplier);
    CHECK(p.multiplier_at(9 * 3'600'000 + 1'799'999) == p.peak_multiplier);
    CHECK(p.multiplier_at(9 * 3'600'000 + 1'800'000) == 1.0);
    CHECK(p.multiplier_at(86'400'000LL + 14 * 3'600'000) == p.peak_multiplier);
}

TEST_CASE("scenario: resolved flow lines cover every sensor once") {
    auto s = make_fleet_scenario(1, 3'600'000);
    auto lines = s.resolved_flow_lines();
    std::map<SensorId, int> seen;
    for (const auto& l : lines) {
        for (const auto& id : l) ++seen[id];
    }
    CHECK(seen.size() == s.sensors.size());
    for (const auto& [id, n] : seen) CHECK(n == 1);
    CHECK(s.sensors.size() == 15);
}
