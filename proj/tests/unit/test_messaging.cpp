#include <doctest.h>

#include "test_support.hpp"

using namespace testsupport;

namespace {

ProtocolError::Kind error_kind(std::string_view line) {
    try {
        parse(line);
    } catch (const ProtocolError& e) {
        return e.kind();
    }
    FAIL("parse accepted " << line);
    return ProtocolError::Kind::bad_json;
}

}  // namespace

TEST_CASE("frame: control signal is one CTL line") {
    ControlSignal s{sid("s1"), action::Escalate{}, 1000, "hq"};
    auto line = frame(s);
    REQUIRE(!line.empty());
    CHECK(line.back() == '\n');
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
    CHECK(line.find("\"t\":\"CTL\"") != std::string::npos);
    CHECK(line.find("\"v\":1") != std::string::npos);
    CHECK(peek_type(line) == "CTL");
    CHECK(std::get<ControlSignal>(parse(line)) == s);
}

TEST_CASE("frame: keys are emitted in lexicographic order") {
    ControlSignal s{sid("s1"), action::PowerSave{}, 5, "quiet"};
    auto line = frame(s);
    auto body = line.find("\"body\"");
    auto t = line.find("\"t\"");
    auto v = line.find("\"v\"");
    CHECK(body < t);
    CHECK(t < v);
}

TEST_CASE("frame: refuses invalid messages") {
    TelemetryMessage m;
    m.sender = sid("s1");
    m.seq = 1;
    m.storage_used_fraction = 1.2;
    CHECK_THROWS_AS(frame(m), ValidationError);
    m.storage_used_fraction = 0.5;
    CHECK_NOTHROW(frame(m));
    m.seq = 0;
    CHECK_THROWS_AS(frame(m), ValidationError);

    ControlSignal s{sid("s1"), action::RelocateStorage{sid("s1")}, 0, ""};
    CHECK_THROWS_AS(frame(s), ValidationError);
    s.action = action::ScheduleUpload{10, 5};
    CHECK_THROWS_AS(frame(s), ValidationError);

    HqCommand q{action::QueryState{}, sid("s1"), 0};
    CHECK_THROWS_AS(frame(q), ValidationError);
    HqCommand e{action::Escalate{}, std::nullopt, 0};
    CHECK_THROWS_AS(frame(e), ValidationError);
}

TEST_CASE("parse: error kinds") {
    CHECK(error_kind("") == ProtocolError::Kind::incomplete_frame);
    CHECK(error_kind("{\"body\":{},\"t\":\"CTL\",\"v\":1}") == ProtocolError::Kind::incomplete_frame);
    CHECK(error_kind("not json\n") == ProtocolError::Kind::bad_json);
    CHECK(error_kind("[1,2]\n") == ProtocolError::Kind::bad_json);
    CHECK(error_kind("{\"body\":{},\"t\":\"XYZ\",\"v\":1}\n") == ProtocolError::Kind::unknown_type);
    CHECK(error_kind("{\"body\":{},\"t\":\"CTL\",\"v\":1}\n") == ProtocolError::Kind::invalid_body);
    CHECK(error_kind("{\"body\":{},\"t\":\"CTL\"}\n") == ProtocolError::Kind::invalid_body);
}

TEST_CASE("parse: unknown version is rejected with the version seen") {
    try {
        parse("{\"body\":{},\"t\":\"CTL\",\"v\":2}\n");
        FAIL("version 2 accepted");
    } catch (const ProtocolError& e) {
        CHECK(e.kind() == ProtocolError::Kind::version_mismatch);
        CHECK(e.version() == 2);
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
}

TEST_CASE("parse: a frame with a field out of range is invalid") {
    TelemetryMessage m;
    m.sender = sid("s1");
    m.seq = 3;
    auto line = frame(m);
    const std::string field = "\"storage\":";
    auto pos = line.find(field);
    REQUIRE(pos != std::string::npos);
    auto end = line.find_first_of(",}", pos + field.size());
    line.replace(pos, end - pos, field + "1.2");
    CHECK(error_kind(line) == ProtocolError::Kind::invalid_body);
}

TEST_CASE("round trip: random messages of every type") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 2000; ++i) {
        auto m = random_message(rng, i);
        auto line = frame(m);
        auto back = parse(line);
        REQUIRE(back == m);
        CHECK(frame(back) == line);
    }
}

TEST_CASE("round trip: HQ response and command share the HQ tag") {
    HqResponse r;
    r.ok = false;
    r.error = "unknown sensor s99";
    CHECK(peek_type(frame(r)) == "HQ");
    CHECK(std::holds_alternative<HqResponse>(parse(frame(r))));
    HqCommand c{action::QueryState{}, std::nullopt, 7};
    CHECK(std::holds_alternative<HqCommand>(parse(frame(c))));
}

TEST_CASE("to_control_action maps everything but query_state") {
    CHECK_FALSE(to_control_action(action::QueryState{}).has_value());
    auto a = to_control_action(action::SetRole{SensorRole::full_cycle});
    REQUIRE(a.has_value());
    CHECK(std::get<action::SetRole>(*a).role == SensorRole::full_cycle);
}

TEST_CASE("SeqTracker rejects stale and duplicate sequence numbers") {
    SeqTracker t;
    CHECK(t.accept(sid("a"), 5));
    CHECK(t.accept(sid("b"), 1));
    CHECK_FALSE(t.accept(sid("a"), 5));
    CHECK_FALSE(t.accept(sid("a"), 4));
    CHECK(t.accept(sid("a"), 9));
    CHECK(t.last(sid("a")) == 9u);
    CHECK(t.duplicates() == 2);
    CHECK_FALSE(t.last(sid("c")).has_value());
}

TEST_CASE("LineDecoder reassembles split input") {
    LineDecoder d;
    d.feed("ab");
    CHECK_FALSE(d.next_line().has_value());
    d.feed("c\nde\nf");
    CHECK(d.next_line() == std::string("abc\n"));
    CHECK(d.next_line() == std::string("de\n"));
    CHECK_FALSE(d.next_line().has_value());
    CHECK(d.has_partial());
    d.feed("\n");
    CHECK(d.next_line() == std::string("f\n"));
    CHECK_FALSE(d.has_partial());
}
