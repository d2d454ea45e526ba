#include "gnsm/messaging.hpp"

#include "json_codec.hpp"

#include <cmath>
#include <limits>

namespace gnsm {

std::string_view to_string(SensorState state) noexcept {
    switch (state) {
        case SensorState::ok: return "ok";
        case SensorState::degraded: return "degraded";
        case SensorState::storage_pressure: return "storage_pressure";
    }
    return "ok";
}

SensorState parse_sensor_state(std::string_view text) {
    for (auto s : {SensorState::ok, SensorState::degraded, SensorState::storage_pressure}) {
        if (to_string(s) == text) return s;
    }
    throw ValidationError("unknown sensor state '" + std::string(text) + "'");
}

std::string_view to_string(NodeMode mode) noexcept {
    switch (mode) {
        case NodeMode::normal: return "normal";
        case NodeMode::warning: return "warning";
        case NodeMode::anomaly: return "anomaly";
        case NodeMode::attack: return "attack";
    }
    return "normal";
}

NodeMode parse_node_mode(std::string_view text) {
    for (auto m : {NodeMode::normal, NodeMode::warning, NodeMode::anomaly, NodeMode::attack}) {
        if (to_string(m) == text) return m;
    }
    throw ValidationError("unknown node mode '" + std::string(text) + "'");
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void validate_action(const SensorId& target, const ControlAction& action) {
    std::visit(overloaded{
                   [](const action::SetRole& a) {
                       if (static_cast<int>(a.role) > 2) throw ValidationError("set_role with invalid role");
                   },
                   [&](const action::RelocateStorage& a) {
                       if (a.to.empty()) throw ValidationError("relocate_storage without destination");
                       if (a.to == target) throw ValidationError("relocate_storage onto its own sensor");
                   },
                   [](const action::ScheduleUpload& a) {
                       if (a.window_end_ms < a.window_start_ms) {
                           throw ValidationError("upload window ends before it starts");
                       }
                   },
                   [](const auto&) {},
               },
               action);
}

}  // namespace

std::string describe(const ControlAction& action) {
    return std::visit(overloaded{
                          [](const action::Escalate&) { return std::string("escalate"); },
                          [](const action::PowerSave&) { return std::string("power_save"); },
                          [](const action::SetRole& a) { return "set_role(" + std::string(to_string(a.role)) + ")"; },
                          [](const action::RelocateStorage& a) { return "relocate_storage(" + a.to.str() + ")"; },
                          [](const action::ScheduleUpload& a) {
                              return "schedule_upload(" + std::to_string(a.window_start_ms) + "," +
                                     std::to_string(a.window_end_ms) + ")";
                          },
                      },
                      action);
}

std::optional<ControlAction> to_control_action(const HqAction& action) {
    return std::visit(overloaded{
                          [](const action::QueryState&) -> std::optional<ControlAction> { return std::nullopt; },
                          [](const auto& a) -> std::optional<ControlAction> { return ControlAction{a}; },
                      },
                      action);
}

void validate(const Message& message) {
    std::visit(overloaded{
                   [](const TelemetryMessage& m) {
                       if (m.sender.empty()) throw ValidationError("telemetry without sender");
                       if (m.seq == 0) throw ValidationError("telemetry seq starts at 1");
                       if (!unit(m.storage_used_fraction)) {
                           throw ValidationError("storage_used_fraction outside [0,1]");
                       }
                       for (const auto& e : m.neighbor_edges) {
                           if (e.peer.empty() || e.peer == m.sender) throw ValidationError("bad neighbor edge peer");
                           if (e.hop_weight <= 0) throw ValidationError("neighbor hop weight must be positive");
                           if (!unit(e.utilization)) throw ValidationError("neighbor utilization outside [0,1]");
                       }
                       for (const auto& a : m.alerts) validate(a);
                   },
                   [](const ControlSignal& s) {
                       if (s.target.empty()) throw ValidationError("control signal without target");
                       validate_action(s.target, s.action);
                   },
                   [](const HqCommand& c) {
                       auto control = to_control_action(c.action);
                       if (!control) {
                           if (c.target) throw ValidationError("query_state takes no target");
                           return;
                       }
                       if (!c.target || c.target->empty()) throw ValidationError("HQ action without target");
                       validate_action(*c.target, *control);
                   },
                   [](const HqResponse& r) {
                       if (r.ok != r.error.empty()) throw ValidationError("HQ response ok/error mismatch");
                       for (const auto& row : r.nodes) {
                           if (!unit(row.weight) || !unit(row.prob) || !unit(row.storage_fraction)) {
                               throw ValidationError("HQ node row value outside [0,1]");
                           }
                       }
                   },
               },
               message);
}

namespace codec {

namespace {

template <class T>
T bounded(const json& j, const char* key, long long lo, long long hi) {
    auto v = j.at(key).get<long long>();
    if (!j.at(key).is_number_integer() || v < lo || v > hi) {
        throw ValidationError(std::string("field '") + key + "' out of range");
    }
    return static_cast<T>(v);
}

SensorId id_at(const json& j, const char* key) { return SensorId(j.at(key).get<std::string>()); }

SensorRole role_at(const json& j, const char* key) {
    auto text = j.at(key).get<std::string>();
    if (text.size() != 1) throw ValidationError("role must be one character");
    auto role = role_from_char(text[0]);
    if (!role) throw ValidationError("unknown role character");
    return *role;
}

json role_json(SensorRole role) { return std::string(1, role_char(role)); }

}  // namespace

json encode(const FlowKey& key) {
    return json{{"dst", key.dst_addr}, {"dport", key.dst_port}, {"proto", key.protocol},
                {"src", key.src_addr}, {"sport", key.src_port}};
}

FlowKey decode_flow_key(const json& j) {
    FlowKey key;
    key.src_addr = bounded<std::uint32_t>(j, "src", 0, std::numeric_limits<std::uint32_t>::max());
    key.dst_addr = bounded<std::uint32_t>(j, "dst", 0, std::numeric_limits<std::uint32_t>::max());
    key.src_port = bounded<std::uint16_t>(j, "sport", 0, 65535);
    key.dst_port = bounded<std::uint16_t>(j, "dport", 0, 65535);
    key.protocol = bounded<std::uint8_t>(j, "proto", 0, 255);
    return key;
}

json encode(const Alert& alert) {
    return json{{"confidence", alert.confidence}, {"flow", encode(alert.key)},
                {"kind", std::string(to_string(alert.kind))}, {"severity", alert.severity},
                {"source", alert.source.str()}, {"time", alert.time_ms}};
}

Alert decode_alert(const json& j) {
    Alert a;
    a.source = id_at(j, "source");
    a.time_ms = j.at("time").get<TimeMs>();
    a.kind = parse_alert_kind(j.at("kind").get<std::string>());
    a.severity = bounded<int>(j, "severity", 1, 5);
    a.key = decode_flow_key(j.at("flow"));
    a.confidence = j.at("confidence").get<double>();
    validate(a);
    return a;
}

json encode(const ControlAction& action) {
    return std::visit(overloaded{
                          [](const action::Escalate&) { return json{{"kind", "escalate"}}; },
                          [](const action::PowerSave&) { return json{{"kind", "power_save"}}; },
                          [](const action::SetRole& a) { return json{{"kind", "set_role"}, {"role", role_json(a.role)}}; },
                          [](const action::RelocateStorage& a) {
                              return json{{"kind", "relocate_storage"}, {"to", a.to.str()}};
                          },
                          [](const action::ScheduleUpload& a) {
                              return json{{"end", a.window_end_ms}, {"kind", "schedule_upload"}, {"start", a.window_start_ms}};
                          },
                      },
                      action);
}

ControlAction decode_control_action(const json& j) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "escalate") return action::Escalate{};
    if (kind == "power_save") return action::PowerSave{};
    if (kind == "set_role") return action::SetRole{role_at(j, "role")};
    if (kind == "relocate_storage") return action::RelocateStorage{id_at(j, "to")};
    if (kind == "schedule_upload") {
        return action::ScheduleUpload{j.at("start").get<TimeMs>(), j.at("end").get<TimeMs>()};
    }
    throw ValidationError("unknown action kind '" + kind + "'");
}

json encode(const ControlSignal& signal) {
    return json{{"action", encode(signal.action)}, {"cause", signal.cause}, {"issued_at", signal.issued_at},
                {"target", signal.target.str()}};
}

ControlSignal decode_control_signal(const json& j) {
    ControlSignal s;
    s.target = id_at(j, "target");
    s.action = decode_control_action(j.at("action"));
    s.issued_at = j.at("issued_at").get<TimeMs>();
    s.cause = j.at("cause").get<std::string>();
    return s;
}

json encode(const TelemetryMessage& m) {
    json edges = json::array();
    for (const auto& e : m.neighbor_edges) {
        edges.push_back(json{{"hop", e.hop_weight}, {"peer", e.peer.str()}, {"util", e.utilization}});
    }
    json alerts = json::array();
    for (const auto& a : m.alerts) alerts.push_back(encode(a));
    return json{{"alerts", alerts},
                {"anomaly", m.anomaly_detected},
                {"attack", m.attack_detected},
                {"edges", edges},
                {"role", role_json(m.role)},
                {"sender", m.sender.str()},
                {"sent_at", m.sent_at},
                {"seq", m.seq},
                {"state", std::string(to_string(m.state))},
                {"storage", m.storage_used_fraction},
                {"storage_moved", m.storage_location_changed}};
}

TelemetryMessage decode_telemetry(const json& j) {
    TelemetryMessage m;
    m.sender = id_at(j, "sender");
    m.seq = j.at("seq").get<std::uint64_t>();
    m.sent_at = j.at("sent_at").get<TimeMs>();
    m.state = parse_sensor_state(j.at("state").get<std::string>());
    m.role = role_at(j, "role");
    m.anomaly_detected = j.at("anomaly").get<bool>();
    m.attack_detected = j.at("attack").get<bool>();
    for (const auto& e : j.at("edges")) {
        m.neighbor_edges.push_back(NeighborEdge{id_at(e, "peer"), e.at("hop").get<int>(), e.at("util").get<double>()});
    }
    m.storage_used_fraction = j.at("storage").get<double>();
    m.storage_location_changed = j.at("storage_moved").get<bool>();
    for (const auto& a : j.at("alerts")) m.alerts.push_back(decode_alert(a));
    return m;
}

json encode(const HqCommand& cmd) {
    json body{{"issued_at", cmd.issued_at}};
    if (auto control = to_control_action(cmd.action)) {
        body["action"] = encode(*control);
        body["op"] = "command";
    } else {
        body["action"] = json{{"kind", "query_state"}};
        body["op"] = "command";
    }
    if (cmd.target) body["target"] = cmd.target->str();
    return body;
}

HqCommand decode_hq_command(const json& j) {
    HqCommand cmd;
    cmd.issued_at = j.at("issued_at").get<TimeMs>();
    const auto& a = j.at("action");
    if (a.at("kind").get<std::string>() == "query_state") {
        cmd.action = action::QueryState{};
    } else {
        cmd.action = std::visit([](auto&& v) -> HqAction { return v; }, decode_control_action(a));
    }
    if (j.contains("target")) cmd.target = id_at(j, "target");
    return cmd;
}

json encode(const HqResponse& r) {
    json nodes = json::array();
    for (const auto& row : r.nodes) {
        nodes.push_back(json{{"id", row.id.str()},
                             {"mode", std::string(to_string(row.mode))},
                             {"prob", row.prob},
                             {"role", role_json(row.role)},
                             {"state", std::string(to_string(row.state))},
                             {"storage", row.storage_fraction},
                             {"weight", row.weight}});
    }
    json queued = json::array();
    for (const auto& s : r.queued) queued.push_back(encode(s));
    return json{{"error", r.error},  {"nodes", nodes},   {"ok", r.ok},
                {"op", "response"},  {"queued", queued}, {"system", r.system_string}};
}

HqResponse decode_hq_response(const json& j) {
    HqResponse r;
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.system_string = j.at("system").get<std::string>();
    for (const auto& n : j.at("nodes")) {
        HqNodeRow row;
        row.id = id_at(n, "id");
        row.role = role_at(n, "role");
        row.weight = n.at("weight").get<double>();
        row.prob = n.at("prob").get<double>();
        row.state = parse_sensor_state(n.at("state").get<std::string>());
        row.mode = parse_node_mode(n.at("mode").get<std::string>());
        row.storage_fraction = n.at("storage").get<double>();
        r.nodes.push_back(std::move(row));
    }
    for (const auto& s : j.at("queued")) r.queued.push_back(decode_control_signal(s));
    return r;
}

std::string envelope_line(std::string_view type_tag, json body) {
    json env{{"body", std::move(body)}, {"t", std::string(type_tag)}, {"v", kProtocolVersion}};
    auto line = env.dump();
    line.push_back('\n');
    return line;
}

}  // namespace codec

std::string frame(const Message& message) {
    validate(message);
    return std::visit(overloaded{
                          [](const TelemetryMessage& m) { return codec::envelope_line("TEL", codec::encode(m)); },
                          [](const ControlSignal& s) { return codec::envelope_line("CTL", codec::encode(s)); },
                          [](const HqCommand& c) { return codec::envelope_line("HQ", codec::encode(c)); },
                          [](const HqResponse& r) { return codec::envelope_line("HQ", codec::encode(r)); },
                      },
                      message);
}

namespace {

codec::json parse_envelope(std::string_view line) {
    if (line.empty() || line.back() != '\n') {
        throw ProtocolError(ProtocolError::Kind::incomplete_frame, "incomplete frame: missing newline terminator");
    }
    line.remove_suffix(1);
    if (line.find('\n') != std::string_view::npos) {
        throw ProtocolError(ProtocolError::Kind::bad_json, "more than one line in frame");
    }
    codec::json env = codec::json::parse(line.begin(), line.end(), nullptr, false);
    if (env.is_discarded() || !env.is_object()) {
        throw ProtocolError(ProtocolError::Kind::bad_json, "frame is not a JSON object");
    }
    return env;
}

}  // namespace

std::string peek_type(std::string_view line) {
    auto env = parse_envelope(line);
    auto it = env.find("t");
    if (it == env.end() || !it->is_string()) {
        throw ProtocolError(ProtocolError::Kind::unknown_type, "frame without type tag");
    }
    return it->get<std::string>();
}

Message parse(std::string_view line) {
    auto env = parse_envelope(line);
    auto v = env.find("v");
    if (v == env.end() || !v->is_number_integer()) {
        throw ProtocolError(ProtocolError::Kind::invalid_body, "frame without integer version");
    }
    if (v->get<long long>() != kProtocolVersion) {
        auto seen = v->get<long long>();
        throw ProtocolError(ProtocolError::Kind::version_mismatch,
                            "unsupported protocol version " + std::to_string(seen), seen);
    }
    auto t = env.find("t");
    if (t == env.end() || !t->is_string()) {
        throw ProtocolError(ProtocolError::Kind::unknown_type, "frame without type tag");
    }
    auto tag = t->get<std::string>();
    if (tag != "TEL" && tag != "CTL" && tag != "HQ") {
        throw ProtocolError(ProtocolError::Kind::unknown_type, "unknown type tag '" + tag + "'");
    }
    auto body = env.find("body");
    if (body == env.end() || !body->is_object()) {
        throw ProtocolError(ProtocolError::Kind::invalid_body, "frame without body object");
    }
    try {
        Message msg;
        if (tag == "TEL") {
            msg = codec::decode_telemetry(*body);
        } else if (tag == "CTL") {
            msg = codec::decode_control_signal(*body);
        } else if (body->value("op", "") == "response") {
            msg = codec::decode_hq_response(*body);
        } else {
            msg = codec::decode_hq_command(*body);
        }
        validate(msg);
        return msg;
    } catch (const codec::json::exception& e) {
        throw ProtocolError(ProtocolError::Kind::invalid_body, std::string("invalid ") + tag + " body: " + e.what());
    } catch (const ValidationError& e) {
        throw ProtocolError(ProtocolError::Kind::invalid_body, std::string("invalid ") + tag + " body: " + e.what());
    }
}

bool SeqTracker::accept(const SensorId& sender, std::uint64_t seq) {
    auto [it, inserted] = last_.try_emplace(sender, seq);
    if (inserted) return true;
    if (seq <= it->second) {
        ++duplicates_;
        return false;
    }
    it->second = seq;
    return true;
}

std::optional<std::uint64_t> SeqTracker::last(const SensorId& sender) const {
    auto it = last_.find(sender);
    if (it == last_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> LineDecoder::next_line() {
    auto pos = buffer_.find('\n');
    if (pos == std::string::npos) return std::nullopt;
    std::string line = buffer_.substr(0, pos + 1);
    buffer_.erase(0, pos + 1);
    return line;
}

}  // namespace gnsm
