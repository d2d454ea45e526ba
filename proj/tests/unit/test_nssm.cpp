#include <doctest.h>

#include "test_support.hpp"

using namespace testsupport;

namespace {

TopologyGraph line_graph(int n, double utilization) {
    TopologyGraph g;
    for (int i = 1; i < n; ++i) g.set_edge(sid(fmt::format("v{}", i)), sid(fmt::format("v{}", i + 1)), {1, utilization});
    return g;
}

}  // namespace

TEST_CASE("nssm: edge cost inflates hops by utilization") {
    CHECK(nssm_edge_cost({2, 0.5}, 1.0) == doctest::Approx(3.0));
    CHECK(nssm_edge_cost({3, 1.0}, 0.0) == doctest::Approx(3.0));
    CHECK(nssm_edge_cost({1, 0.25}, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("nssm: single-node graph has no candidate") {
    TopologyGraph g;
    g.add_vertex(sid("s1"));
    CHECK_FALSE(nssm_select(g, sid("s1"), {{sid("s1"), 0.1}}).has_value());
}

TEST_CASE("nssm: source missing from graph is an error") {
    TopologyGraph g;
    g.add_vertex(sid("s1"));
    CHECK_THROWS_AS(nssm_select(g, sid("s2"), {}), ValidationError);
}

TEST_CASE("nssm: five-node line with only the far end free") {
    auto g = line_graph(5, 0.3);
    std::map<SensorId, double> f{{sid("v1"), 0.9}, {sid("v2"), 0.8}, {sid("v3"), 0.6}, {sid("v4"), 0.5}, {sid("v5"), 0.2}};
    CHECK(nssm_select(g, sid("v1"), f) == sid("v5"));
    CHECK(nssm_select(g, sid("v1"), f) == brute_force_select(g, sid("v1"), f, 1.0, 0.5));
}

TEST_CASE("nssm: equidistant candidates resolve to the smaller id") {
    TopologyGraph g;
    g.set_edge(sid("src"), sid("b"), {1, 0.0});
    g.set_edge(sid("src"), sid("a"), {1, 0.0});
    std::map<SensorId, double> f{{sid("a"), 0.1}, {sid("b"), 0.1}};
    CHECK(nssm_select(g, sid("src"), f) == sid("a"));
}

TEST_CASE("nssm: the ceiling is strict and the source never qualifies") {
    TopologyGraph g;
    g.set_edge(sid("a"), sid("b"), {1, 0.0});
    CHECK_FALSE(nssm_select(g, sid("a"), {{sid("a"), 0.0}, {sid("b"), 0.5}}).has_value());
    CHECK(nssm_select(g, sid("a"), {{sid("a"), 0.0}, {sid("b"), 0.49}}) == sid("b"));
}

TEST_CASE("nssm: utilization can make a longer path cheaper") {
    TopologyGraph g;
    g.set_edge(sid("s"), sid("x"), {1, 1.0});  // cost 2
    g.set_edge(sid("s"), sid("m"), {1, 0.0});
    g.set_edge(sid("m"), sid("y"), {1, 0.5});  // total 2.5
    std::map<SensorId, double> f{{sid("x"), 0.1}, {sid("y"), 0.1}};
    CHECK(nssm_select(g, sid("s"), f, {1.0, 0.5}) == sid("x"));
    CHECK(nssm_select(g, sid("s"), f, {0.0, 0.5}) == sid("x"));
    f[sid("x")] = 0.7;
    CHECK(nssm_select(g, sid("s"), f, {1.0, 0.5}) == sid("y"));
}

TEST_CASE("nssm: shortest distances agree with simple-path enumeration") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto g = random_graph(rng, 8);
        const auto& source = g.ids.front();
        auto d = shortest_distances(g.graph, source, 1.0);
        auto oracle = all_simple_path_costs(g.graph, source, 1.0);
        REQUIRE(d.size() == oracle.size());
        for (const auto& [id, c] : oracle) CHECK(d.at(id) == doctest::Approx(c));
    }
}

TEST_CASE("nssm: selection agrees with brute force on random graphs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> alpha(0.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        auto g = random_graph(rng, 8);
        NssmParams p{alpha(rng), 0.5};
        for (const auto& source : g.ids) {
            CHECK(nssm_select(g.graph, source, g.fractions, p) ==
                  brute_force_select(g.graph, source, g.fractions, p.alpha, p.storage_ceiling));
        }
    }
}
