#include <doctest.h>

#include "gnsm/hub.hpp"
#include "test_support.hpp"

using namespace testsupport;

namespace {

TelemetryMessage tel(const std::string& id, std::uint64_t seq, TimeMs t) {
    TelemetryMessage m;
    m.sender = sid(id);
    m.seq = seq;
    m.sent_at = t;
    return m;
}

HubState random_state(std::mt19937_64& rng) {
    HubState st;
    auto g = random_graph(rng, 7);
    st.topology = g.graph;
    st.now_ms = std::uniform_int_distribution<TimeMs>(0, 1'000'000)(rng);
    st.config.quiet_period_ms = 300'000;
    const NodeMode modes[] = {NodeMode::normal, NodeMode::warning, NodeMode::anomaly, NodeMode::attack};
    const SensorState states[] = {SensorState::ok, SensorState::degraded, SensorState::storage_pressure};
    for (const auto& id : g.ids) {
        NodeRecord r;
        r.role = random_role(rng);
        r.mode = modes[std::uniform_int_distribution<int>(0, 3)(rng)];
        r.state = states[std::uniform_int_distribution<int>(0, 2)(rng)];
        r.storage_fraction = g.fractions.count(id) ? g.fractions.at(id) : 0.9;
        r.quiet_since = std::uniform_int_distribution<TimeMs>(0, st.now_ms)(rng);
        r.relocation_pending = std::bernoulli_distribution(0.2)(rng);
        st.nodes[id] = r;
    }
    return st;
}

// Rule table written out directly: one pass per rule, first occurrence of a
// (target, action) pair wins.
std::vector<ControlSignal> decide_oracle(const HubState& st) {
    std::vector<ControlSignal> out;
    auto add = [&](ControlSignal s) {
        for (const auto& o : out) {
            if (o.target == s.target && o.action == s.action) return;
        }
        out.push_back(std::move(s));
    };
    for (const auto& [id, r] : st.nodes) {
        if (r.mode != NodeMode::attack) continue;
        add({id, action::SetRole{SensorRole::full_cycle}, st.now_ms, cause::attack});
        for (const auto& [edge, attrs] : st.topology.edges()) {
            SensorId peer;
            if (edge.first == id) peer = edge.second;
            else if (edge.second == id) peer = edge.first;
            else continue;
            if (st.nodes.count(peer)) add({peer, action::Escalate{}, st.now_ms, cause::attack_neighbor});
        }
    }
    for (const auto& [id, r] : st.nodes) {
        if (r.mode == NodeMode::anomaly) add({id, action::Escalate{}, st.now_ms, cause::anomaly});
    }
    for (const auto& [id, r] : st.nodes) {
        if (r.mode == NodeMode::normal && r.role > st.config.power_save_floor &&
            st.now_ms - r.quiet_since >= st.config.quiet_period_ms) {
            add({id, action::PowerSave{}, st.now_ms, cause::quiet});
        }
    }
    std::map<SensorId, double> fractions;
    for (const auto& [id, r] : st.nodes) fractions[id] = r.storage_fraction;
    for (const auto& [id, r] : st.nodes) {
        if (r.state != SensorState::storage_pressure || r.relocation_pending) continue;
        auto target = brute_force_select(st.topology, id, fractions, st.config.nssm.alpha, st.config.nssm.storage_ceiling);
        if (target) add({id, action::RelocateStorage{*target}, st.now_ms, cause::storage});
    }
    return out;
}

std::string frames(const std::vector<ControlSignal>& signals) {
    std::string s;
    for (const auto& x : signals) s += frame(x);
    return s;
}

}  // namespace

TEST_CASE("hub: fresh nodes start half-cycle with neutral priors") {
    Hub hub({}, {sid("s1"), sid("s2")});
    for (const auto& [id, rec] : hub.state().nodes) {
        CHECK(rec.role == SensorRole::half_cycle);
        CHECK(rec.weight == 0.5);
        CHECK(rec.prob == 0.5);
    }
}

TEST_CASE("hub: query_state on a fresh two-node hub") {
    Hub hub({}, {sid("s1"), sid("s2")});
    auto r = hub.hq_command({action::QueryState{}, std::nullopt, 0});
    CHECK(r.ok);
    CHECK(r.system_string == "s1:H:0.50:0.50|s2:H:0.50:0.50");
    auto decoded = decode_system_string(r.system_string);
    REQUIRE(decoded.size() == 2);
    for (const auto& [id, e] : decoded) CHECK(e.role == SensorRole::half_cycle);
    CHECK(r.nodes.size() == 2);
}

TEST_CASE("hub: set_role queues one signal for its target") {
    Hub hub({}, {sid("s1"), sid("s2")});
    auto r = hub.hq_command({action::SetRole{SensorRole::full_cycle}, sid("s1"), 10});
    REQUIRE(r.queued.size() == 1);
    CHECK(r.queued[0].target == sid("s1"));
    CHECK(hub.state().pending_signals.size() == 1);
    CHECK(hub.state().pending_signals[0].cause == cause::operator_command);
}

TEST_CASE("hub: unknown target names the id") {
    Hub hub({}, {sid("s1")});
    try {
        hub.hq_command({action::Escalate{}, sid("s99"), 0});
        FAIL("unknown sensor accepted");
    } catch (const UnknownSensorError& e) {
        CHECK(e.id() == sid("s99"));
        CHECK(std::string(e.what()).find("s99") != std::string::npos);
    }
    auto r = hub.handle_hq({action::Escalate{}, sid("s99"), 0});
    CHECK_FALSE(r.ok);
    CHECK(r.error.find("s99") != std::string::npos);
    CHECK(hub.state().pending_signals.empty());
}

TEST_CASE("hub: attack telemetry sets attack mode") {
    Hub hub({}, {sid("s1")});
    auto m = tel("s1", 1, 100);
    m.attack_detected = true;
    CHECK(hub.ingest_telemetry(m));
    CHECK(hub.state().nodes.at(sid("s1")).mode == NodeMode::attack);
}

TEST_CASE("hub: anomaly raises mode but never lowers attack") {
    Hub hub({}, {sid("s1")});
    auto m = tel("s1", 1, 0);
    m.attack_detected = true;
    hub.ingest_telemetry(m);
    auto n = tel("s1", 2, 1);
    n.anomaly_detected = true;
    hub.ingest_telemetry(n);
    CHECK(hub.state().nodes.at(sid("s1")).mode == NodeMode::attack);
    hub.ingest_telemetry(tel("s1", 3, 2));
    CHECK(hub.state().nodes.at(sid("s1")).mode == NodeMode::attack);
}

TEST_CASE("hub: stale sequence numbers leave state unchanged") {
    Hub hub({}, {sid("s1")});
    auto m = tel("s1", 5, 0);
    m.storage_used_fraction = 0.3;
    hub.ingest_telemetry(m);
    auto before = hub.state().nodes;
    auto stale = tel("s1", 5, 0);
    stale.attack_detected = true;
    stale.storage_used_fraction = 0.9;
    CHECK_FALSE(hub.ingest_telemetry(stale));
    stale.seq = 4;
    CHECK_FALSE(hub.ingest_telemetry(stale));
    CHECK(hub.state().nodes == before);
    CHECK(hub.state().duplicate_telemetry == 2);
}

TEST_CASE("hub: neighbor edges merge into the topology idempotently") {
    Hub hub({}, {sid("s1")});
    auto m = tel("s1", 1, 0);
    m.neighbor_edges = {{sid("a"), 1, 0.1}, {sid("b"), 2, 0.2}, {sid("hub"), 1, 0.0}};
    hub.ingest_telemetry(m);
    auto edges = hub.state().topology.edges();
    CHECK(edges.size() == 3);
    for (const auto& e : m.neighbor_edges) {
        CHECK(hub.state().topology.edge(sid("s1"), e.peer) == EdgeAttrs{e.hop_weight, e.utilization});
    }
    m.seq = 2;
    hub.ingest_telemetry(m);
    CHECK(hub.state().topology.edges() == edges);
    CHECK(hub.state().nodes.count(sid("a")) == 1);
    CHECK(hub.state().nodes.count(sid("hub")) == 0);
}

TEST_CASE("hub: unknown senders are registered") {
    Hub hub({}, {});
    hub.ingest_telemetry(tel("new", 1, 0));
    CHECK(hub.state().nodes.count(sid("new")) == 1);
}

TEST_CASE("decide: attack node with two neighbors") {
    HubState st;
    st.topology.set_edge(sid("s1"), sid("s2"), {});
    st.topology.set_edge(sid("s1"), sid("s3"), {});
    st.nodes[sid("s1")].mode = NodeMode::attack;
    st.nodes[sid("s2")];
    st.nodes[sid("s3")];
    auto out = decide(st);
    REQUIRE(out.size() == 3);
    CHECK(out[0].target == sid("s1"));
    CHECK(std::get<action::SetRole>(out[0].action).role == SensorRole::full_cycle);
    CHECK(out[1].target == sid("s2"));
    CHECK(std::holds_alternative<action::Escalate>(out[1].action));
    CHECK(out[2].target == sid("s3"));
    CHECK(out[2].cause == cause::attack_neighbor);
}

TEST_CASE("decide: quiet nodes below the quiet period produce nothing") {
    HubState st;
    st.now_ms = 299'999;
    st.nodes[sid("s1")];
    st.nodes[sid("s2")];
    CHECK(decide(st).empty());
}

TEST_CASE("decide: quiet boundary is inclusive") {
    for (TimeMs delta : {-1, 0, 1}) {
        HubState st;
        st.nodes[sid("s1")].quiet_since = 1000;
        st.now_ms = 1000 + st.config.quiet_period_ms + delta;
        auto out = decide(st);
        if (delta < 0) {
            CHECK(out.empty());
        } else {
            REQUIRE(out.size() == 1);
            CHECK(std::holds_alternative<action::PowerSave>(out[0].action));
            CHECK(out[0].cause == cause::quiet);
        }
    }
}

TEST_CASE("decide: nothing below the power-save floor") {
    HubState st;
    st.config.power_save_floor = SensorRole::half_cycle;
    st.now_ms = 10'000'000;
    st.nodes[sid("s1")].role = SensorRole::half_cycle;
    CHECK(decide(st).empty());
    st.nodes[sid("s1")].role = SensorRole::full_cycle;
    CHECK(decide(st).size() == 1);
}

TEST_CASE("decide: storage pressure relocates to the nearest free node") {
    HubState st;
    st.topology.set_edge(sid("s1"), sid("s2"), {1, 0.0});
    st.topology.set_edge(sid("s2"), sid("s3"), {1, 0.0});
    st.nodes[sid("s1")].state = SensorState::storage_pressure;
    st.nodes[sid("s1")].storage_fraction = 0.9;
    st.nodes[sid("s2")].storage_fraction = 0.6;
    st.nodes[sid("s3")].storage_fraction = 0.1;
    auto out = decide(st);
    REQUIRE(out.size() == 1);
    CHECK(std::get<action::RelocateStorage>(out[0].action).to == sid("s3"));
    st.nodes[sid("s1")].relocation_pending = true;
    CHECK(decide(st).empty());
}

TEST_CASE("decide: agrees with the rule table on random states") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        auto st = random_state(rng);
        auto out = decide(st);
        CHECK(frames(out) == frames(decide_oracle(st)));
    }
}

TEST_CASE("decide: pure function of state") {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 200; ++trial) {
        auto st = random_state(rng);
        auto copy = st;
        CHECK(frames(decide(st)) == frames(decide(copy)));
        CHECK(frames(decide(st)) == frames(decide(st)));
    }
}

TEST_CASE("dispatch: operator signals precede autonomous ones") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        HubConfig cfg;
        cfg.quiet_period_ms = 1000;
        std::vector<SensorId> fleet{sid("s1"), sid("s2"), sid("s3")};
        Hub hub(cfg, fleet);
        for (int k = 0; k < 3; ++k) {
            auto m = tel(fleet[k].str(), 1, 0);
            m.attack_detected = std::bernoulli_distribution(0.5)(rng);
            m.anomaly_detected = std::bernoulli_distribution(0.5)(rng);
            hub.ingest_telemetry(m);
        }
        std::size_t ops = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
        for (std::size_t k = 0; k < ops; ++k) {
            HqCommand c;
            c.target = fleet[k];
            c.action = action::PowerSave{};
            hub.hq_command(c);
        }
        auto out = hub.dispatch(5000);
        REQUIRE(out.size() >= ops);
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK((out[i].cause == cause::operator_command) == (i < ops));
        }
        CHECK(hub.state().pending_signals.empty());
    }
}

TEST_CASE("dispatch: a quiet node is stepped down once per quiet period") {
    Hub hub({}, {sid("s1")});
    auto first = hub.dispatch(300'000);
    REQUIRE(first.size() == 1);
    CHECK(hub.state().nodes.at(sid("s1")).role == SensorRole::collection_only);
    CHECK(hub.dispatch(300'001).empty());
    CHECK(hub.dispatch(600'000).empty());
}

TEST_CASE("dispatch: attack handling escalates and then settles") {
    TopologyGraph g;
    g.set_edge(sid("s1"), sid("s2"), {});
    Hub hub({}, {sid("s1"), sid("s2")}, g);
    auto m = tel("s1", 1, 0);
    m.attack_detected = true;
    hub.ingest_telemetry(m);
    auto out = hub.dispatch(10);
    REQUIRE(out.size() == 2);
    CHECK(hub.state().nodes.at(sid("s1")).role == SensorRole::full_cycle);
    CHECK(hub.state().nodes.at(sid("s2")).role == SensorRole::full_cycle);
    CHECK(hub.state().nodes.at(sid("s1")).mode == NodeMode::warning);
    CHECK(hub.dispatch(20).empty());
}

TEST_CASE("upload: no stored bytes gives an empty plan") {
    std::map<SensorId, NodeStorage> s{{sid("a"), {0.0, 0}}, {sid("b"), {0.0, 0}}};
    CHECK(schedule_cloud_upload(s, {{{0, 10}}, 100}).empty());
}

TEST_CASE("upload: fullest node goes first") {
    std::map<SensorId, NodeStorage> s{{sid("a"), {0.6, 60}}, {sid("b"), {0.9, 90}}};
    auto plan = schedule_cloud_upload(s, {{{0, 10}}, 90});
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].node == sid("b"));
    CHECK(plan[0].bytes == 90);
}

TEST_CASE("upload: remainder spills into the next window") {
    std::map<SensorId, NodeStorage> s{{sid("a"), {0.9, 150}}};
    auto plan = schedule_cloud_upload(s, {{{0, 10}, {20, 30}}, 100});
    REQUIRE(plan.size() == 2);
    CHECK(plan[0].bytes == 100);
    CHECK(plan[1].bytes == 50);
    CHECK(plan[1].window_index == 1);
}

TEST_CASE("upload: overlapping windows are rejected") {
    std::map<SensorId, NodeStorage> s{{sid("a"), {0.9, 150}}};
    CHECK_THROWS_AS(schedule_cloud_upload(s, {{{0, 10}, {5, 30}}, 100}), ValidationError);
    CHECK_THROWS_AS(schedule_cloud_upload(s, {{{10, 0}}, 100}), ValidationError);
}

TEST_CASE("upload: conservation and greedy order on random fleets") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        std::map<SensorId, NodeStorage> s;
        std::uint64_t total = 0;
        for (int n = std::uniform_int_distribution<int>(0, 8)(rng); n > 0; --n) {
            auto bytes = std::uniform_int_distribution<std::uint64_t>(0, 1000)(rng);
            s[random_id(rng)] = NodeStorage{static_cast<double>(bytes) / 1000.0, bytes};
        }
        for (const auto& [id, st] : s) total += st.bytes;
        UploadPolicy policy;
        for (int w = std::uniform_int_distribution<int>(0, 4)(rng), t = 0; w > 0; --w, t += 100) policy.windows.push_back({t, t + 50});
        policy.max_bytes_per_window = std::uniform_int_distribution<std::uint64_t>(1, 1500)(rng);
        auto plan = schedule_cloud_upload(s, policy);

        std::uint64_t sum = 0;
        std::map<SensorId, std::uint64_t> per_node;
        std::map<std::size_t, std::uint64_t> per_window;
        for (const auto& a : plan) {
            sum += a.bytes;
            per_node[a.node] += a.bytes;
            per_window[a.window_index] += a.bytes;
            CHECK(a.bytes > 0);
        }
        CHECK(sum <= total);
        CHECK(sum == std::min<std::uint64_t>(total, policy.max_bytes_per_window * policy.windows.size()));
        for (const auto& [id, b] : per_node) CHECK(b <= s.at(id).bytes);
        for (const auto& [w, b] : per_window) CHECK(b <= policy.max_bytes_per_window);

        // Greedy order: by fraction descending, then id.
        std::vector<std::pair<double, SensorId>> order;
        for (const auto& [id, st] : s) order.emplace_back(-st.fraction, id);
        std::sort(order.begin(), order.end());
        std::vector<SensorId> expected_nodes;
        for (const auto& [f, id] : order) {
            if (s.at(id).bytes > 0) expected_nodes.push_back(id);
        }
        std::vector<SensorId> seen;
        for (const auto& a : plan) {
            if (seen.empty() || seen.back() != a.node) seen.push_back(a.node);
        }
        REQUIRE(seen.size() <= expected_nodes.size());
        CHECK(std::equal(seen.begin(), seen.end(), expected_nodes.begin()));
    }
}

TEST_CASE("hub: replaying the persisted log rebuilds node state") {
    std::mt19937_64 rng(90);
    TopologyGraph g;
    g.set_edge(sid("s1"), sid("s2"), {});
    g.set_edge(sid("s2"), sid("s3"), {1, 0.5});
    std::vector<SensorId> fleet{sid("s1"), sid("s2"), sid("s3")};
    Hub live({}, fleet, g);
    std::vector<std::string> log;
    live.set_sink([&](const std::string& line) { log.push_back(line); });
    std::uint64_t seq = 0;
    for (TimeMs t = 0; t < 3'600'000; t += 60'000) {
        ++seq;
        for (const auto& id : fleet) {
            auto m = tel(id.str(), seq, t);
            m.role = live.state().nodes.at(id).role;
            m.anomaly_detected = std::bernoulli_distribution(0.05)(rng);
            m.attack_detected = std::bernoulli_distribution(0.02)(rng);
            m.storage_used_fraction = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            m.state = m.storage_used_fraction >= 0.8 ? SensorState::storage_pressure : SensorState::ok;
            live.ingest_telemetry(m);
        }
        if (seq % 7 == 0) live.handle_hq({action::Escalate{}, sid("s3"), t});
        live.dispatch(t);
    }
    REQUIRE(!log.empty());

    Hub backup({}, fleet, g);
    backup.replay(log);
    CHECK(backup.state().nodes == live.state().nodes);
    CHECK(backup.state().topology == live.state().topology);
    CHECK(backup.system_string() == live.system_string());

    // Lines read back from disk lack the newline.
    std::vector<std::string> stripped;
    for (auto l : log) {
        l.pop_back();
        stripped.push_back(l);
    }
    Hub backup2({}, fleet, g);
    backup2.replay(stripped);
    CHECK(backup2.state().nodes == live.state().nodes);
}

TEST_CASE("hub: weight tracks the alert rate") {
    Hub hub({}, {sid("s1")});
    for (std::uint64_t s = 1; s <= 50; ++s) {
        auto m = tel("s1", s, static_cast<TimeMs>(s));
        m.anomaly_detected = true;
        hub.ingest_telemetry(m);
    }
    CHECK(hub.state().nodes.at(sid("s1")).weight > 0.99);
    for (std::uint64_t s = 51; s <= 100; ++s) hub.ingest_telemetry(tel("s1", s, static_cast<TimeMs>(s)));
    CHECK(hub.state().nodes.at(sid("s1")).weight < 0.01);
}
