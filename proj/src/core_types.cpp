#include "gnsm/core_types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>

namespace gnsm {

SensorId::SensorId(std::string token) : token_(std::move(token)) {
    if (!valid_sensor_token(token_)) {
        throw ValidationError("invalid sensor id '" + token_ + "'");
    }
}

bool valid_sensor_token(std::string_view token) noexcept {
    if (token.empty()) return false;
    return std::all_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::string_view to_string(Site site) noexcept {
    switch (site) {
        case Site::plant: return "plant";
        case Site::sales: return "sales";
        case Site::server_room: return "server-room";
        case Site::branch_1: return "branch-1";
        case Site::branch_2: return "branch-2";
        case Site::branch_3: return "branch-3";
    }
    return "plant";
}

Site parse_site(std::string_view text) {
    for (auto site : {Site::plant, Site::sales, Site::server_room, Site::branch_1, Site::branch_2,
                      Site::branch_3}) {
        if (to_string(site) == text) return site;
    }
    throw ValidationError("unknown site '" + std::string(text) + "'");
}

char role_char(SensorRole role) noexcept {
    switch (role) {
        case SensorRole::collection_only: return 'C';
        case SensorRole::half_cycle: return 'H';
        case SensorRole::full_cycle: return 'F';
    }
    return 'C';
}

std::optional<SensorRole> role_from_char(char c) noexcept {
    switch (c) {
        case 'C': return SensorRole::collection_only;
        case 'H': return SensorRole::half_cycle;
        case 'F': return SensorRole::full_cycle;
        default: return std::nullopt;
    }
}

std::string_view to_string(SensorRole role) noexcept {
    switch (role) {
        case SensorRole::collection_only: return "collection";
        case SensorRole::half_cycle: return "half";
        case SensorRole::full_cycle: return "full";
    }
    return "collection";
}

SensorRole parse_role(std::string_view text) {
    if (text.size() == 1) {
        if (auto r = role_from_char(text[0])) return *r;
    }
    for (auto role : kAllRoles) {
        if (to_string(role) == text) return role;
    }
    throw ValidationError("unknown role '" + std::string(text) + "'");
}

std::string to_string(const FlowKey& key) {
    auto dotted = [](std::uint32_t a) {
        return fmt::format("{}.{}.{}.{}", (a >> 24) & 0xff, (a >> 16) & 0xff, (a >> 8) & 0xff, a & 0xff);
    };
    return fmt::format("{}:{}->{}:{}/{}", dotted(key.src_addr), key.src_port, dotted(key.dst_addr),
                       key.dst_port, key.protocol);
}

std::string_view to_string(RecordKind kind) noexcept {
    switch (kind) {
        case RecordKind::full_packet: return "pcap";
        case RecordKind::flow_record: return "flow";
        case RecordKind::pstr_record: return "pstr";
    }
    return "flow";
}

bool is_printable(std::string_view text) noexcept {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return c >= 0x20 && c < 0x7f; });
}

void validate(const CaptureRecord& record) {
    if (record.end_ms < record.start_ms) throw ValidationError("capture record ends before it starts");
    if (record.packets > 0 || record.bytes > 0) {
        if (record.packets < 1) throw ValidationError("non-empty capture record without packets");
        if (record.bytes < record.packets) throw ValidationError("capture record has fewer bytes than packets");
    }
    if (record.kind == RecordKind::pstr_record) {
        if (record.excerpt.size() > kMaxPstrExcerpt) throw ValidationError("PSTR excerpt longer than 256 chars");
        if (!is_printable(record.excerpt)) throw ValidationError("PSTR excerpt contains non-printable characters");
    } else if (!record.excerpt.empty()) {
        throw ValidationError("only PSTR records carry an excerpt");
    }
    if (record.kind != RecordKind::full_packet && record.payload_bytes != 0) {
        throw ValidationError("only full-packet records carry a payload size");
    }
    if (record.payload_bytes > record.bytes) throw ValidationError("payload larger than record");
}

std::string_view to_string(AlertKind kind) noexcept {
    return kind == AlertKind::anomaly ? "anomaly" : "attack_attempt";
}

AlertKind parse_alert_kind(std::string_view text) {
    if (text == "anomaly") return AlertKind::anomaly;
    if (text == "attack_attempt") return AlertKind::attack_attempt;
    throw ValidationError("unknown alert kind '" + std::string(text) + "'");
}

void validate(const Alert& alert) {
    if (alert.source.empty()) throw ValidationError("alert without source");
    if (alert.severity < 1 || alert.severity > 5) throw ValidationError("alert severity outside 1..5");
    if (!(alert.confidence >= 0.0 && alert.confidence <= 1.0)) {
        throw ValidationError("alert confidence outside [0,1]");
    }
}

void TopologyGraph::add_vertex(const SensorId& id) {
    if (id.empty()) throw ValidationError("empty vertex id");
    vertices_.insert(id);
    adjacency_[id];
}

void TopologyGraph::set_edge(const SensorId& a, const SensorId& b, EdgeAttrs attrs) {
    if (a == b) throw ValidationError("self-loop on " + a.str());
    if (attrs.hop_weight <= 0) throw ValidationError("hop weight must be positive");
    if (!(attrs.utilization >= 0.0 && attrs.utilization <= 1.0)) {
        throw ValidationError("edge utilization outside [0,1]");
    }
    add_vertex(a);
    add_vertex(b);
    edges_[std::minmax(a, b)] = attrs;
    adjacency_[a].insert(b);
    adjacency_[b].insert(a);
}

std::optional<EdgeAttrs> TopologyGraph::edge(const SensorId& a, const SensorId& b) const {
    auto it = edges_.find(std::minmax(a, b));
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::pair<SensorId, EdgeAttrs>> TopologyGraph::neighbors(const SensorId& id) const {
    std::vector<std::pair<SensorId, EdgeAttrs>> out;
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) return out;
    out.reserve(it->second.size());
    for (const auto& peer : it->second) out.emplace_back(peer, edges_.at(std::minmax(id, peer)));
    return out;
}

namespace {

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

// Exactly "d.dd" with a value in [0,1].
std::optional<double> parse_fixed2(std::string_view text) {
    if (text.size() != 4 || text[1] != '.') return std::nullopt;
    for (std::size_t i : {0u, 2u, 3u}) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    }
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!unit_interval(value)) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
        auto pos = text.find(sep, begin);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(begin));
            return parts;
        }
        parts.push_back(text.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

}  // namespace

std::string encode_system_string(const NodeStateTable& table) {
    std::string out;
    for (const auto& [id, entry] : table) {
        if (!unit_interval(entry.weight) || !unit_interval(entry.prob)) {
            throw ValidationError("weight/prob outside [0,1] for " + id.str());
        }
        if (!out.empty()) out += '|';
        out += fmt::format("{}:{}:{:.2f}:{:.2f}", id.str(), role_char(entry.role), entry.weight, entry.prob);
    }
    return out;
}

NodeStateTable decode_system_string(std::string_view text) {
    NodeStateTable table;
    if (text.empty()) return table;
    auto segments = split(text, '|');
    for (std::size_t i = 0; i < segments.size(); ++i) {
        auto fields = split(segments[i], ':');
        if (fields.size() != 4) throw StateStringError(i, "expected id:role:weight:prob");
        if (!valid_sensor_token(fields[0])) throw StateStringError(i, "invalid sensor id");
        if (fields[1].size() != 1) throw StateStringError(i, "role must be one character");
        auto role = role_from_char(fields[1][0]);
        if (!role) throw StateStringError(i, "unknown role '" + std::string(fields[1]) + "'");
        auto weight = parse_fixed2(fields[2]);
        if (!weight) throw StateStringError(i, "weight must be 0.00-1.00");
        auto prob = parse_fixed2(fields[3]);
        if (!prob) throw StateStringError(i, "prob must be 0.00-1.00");
        SensorId id{std::string(fields[0])};
        if (!table.empty() && !(table.rbegin()->first < id)) {
            throw StateStringError(i, "segments out of order or duplicated");
        }
        table.emplace_hint(table.end(), std::move(id), NodeStateEntry{*role, *weight, *prob});
    }
    return table;
}

}  // namespace gnsm
