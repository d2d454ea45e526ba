#pragma once

/// @file core_types.hpp
/// @brief Shared vocabulary for the sensor fleet: identities, roles, capture
/// records, alerts, the neighbor topology and the system-state string.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gnsm {

/// Milliseconds since scenario start. The simulator is the only clock.
using TimeMs = std::int64_t;

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse failure inside a system-state string; carries the offending segment.
class StateStringError : public std::runtime_error {
public:
    StateStringError(std::size_t segment, const std::string& what)
        : std::runtime_error("segment " + std::to_string(segment) + ": " + what), segment_(segment) {}
    std::size_t segment() const noexcept { return segment_; }

private:
    std::size_t segment_;
};

/// Opaque sensor token. Ordered lexicographically; the hub uses the same
/// type with the reserved token "hub".
class SensorId {
public:
    SensorId() = default;
    explicit SensorId(std::string token);

    const std::string& str() const noexcept { return token_; }
    bool empty() const noexcept { return token_.empty(); }

    auto operator<=>(const SensorId&) const = default;

private:
    std::string token_;
};

/// True when `token` is usable as a SensorId (non-empty, [A-Za-z0-9_.-] only).
bool valid_sensor_token(std::string_view token) noexcept;

enum class Site : std::uint8_t { plant, sales, server_room, branch_1, branch_2, branch_3 };

std::string_view to_string(Site site) noexcept;
Site parse_site(std::string_view text);

/// Declaration order is the role order: CollectionOnly < HalfCycle < FullCycle.
enum class SensorRole : std::uint8_t { collection_only = 0, half_cycle = 1, full_cycle = 2 };

inline constexpr SensorRole kAllRoles[] = {SensorRole::collection_only, SensorRole::half_cycle,
                                           SensorRole::full_cycle};

char role_char(SensorRole role) noexcept;
std::optional<SensorRole> role_from_char(char c) noexcept;
std::string_view to_string(SensorRole role) noexcept;
/// Accepts "collection", "half", "full" (and the C/H/F characters).
SensorRole parse_role(std::string_view text);

struct FlowKey {
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t protocol = 0;

    auto operator<=>(const FlowKey&) const = default;
};

std::string to_string(const FlowKey& key);

enum class RecordKind : std::uint8_t { full_packet, flow_record, pstr_record };

std::string_view to_string(RecordKind kind) noexcept;

inline constexpr std::size_t kMaxPstrExcerpt = 256;

/// One unit of captured traffic. `payload_bytes` is only meaningful for
/// full-packet records and `excerpt` only for PSTR records.
struct CaptureRecord {
    RecordKind kind = RecordKind::flow_record;
    FlowKey key;
    TimeMs start_ms = 0;
    TimeMs end_ms = 0;
    std::uint64_t bytes = 0;
    std::uint64_t packets = 0;
    std::uint64_t payload_bytes = 0;
    std::string excerpt;

    bool operator==(const CaptureRecord&) const = default;
};

/// Throws ValidationError when a record breaks its invariants.
void validate(const CaptureRecord& record);

bool is_printable(std::string_view text) noexcept;

enum class AlertKind : std::uint8_t { anomaly, attack_attempt };

std::string_view to_string(AlertKind kind) noexcept;
AlertKind parse_alert_kind(std::string_view text);

struct Alert {
    SensorId source;
    TimeMs time_ms = 0;
    AlertKind kind = AlertKind::anomaly;
    int severity = 1;
    FlowKey key;
    double confidence = 0.0;

    bool operator==(const Alert&) const = default;
};

void validate(const Alert& alert);

struct EdgeAttrs {
    int hop_weight = 1;
    double utilization = 0.0;

    bool operator==(const EdgeAttrs&) const = default;
};

/// Undirected weighted neighbor graph. May be disconnected.
class TopologyGraph {
public:
    using EdgeKey = std::pair<SensorId, SensorId>;

    void add_vertex(const SensorId& id);
    /// Inserts or replaces the edge {a, b}. Endpoints are added as vertices.
    void set_edge(const SensorId& a, const SensorId& b, EdgeAttrs attrs);

    bool contains(const SensorId& id) const { return vertices_.count(id) != 0; }
    std::optional<EdgeAttrs> edge(const SensorId& a, const SensorId& b) const;
    /// Neighbors of `id` in ascending id order.
    std::vector<std::pair<SensorId, EdgeAttrs>> neighbors(const SensorId& id) const;

    const std::set<SensorId>& vertices() const noexcept { return vertices_; }
    /// Keys are stored with first < second.
    const std::map<EdgeKey, EdgeAttrs>& edges() const noexcept { return edges_; }

    bool operator==(const TopologyGraph&) const = default;

private:
    std::set<SensorId> vertices_;
    std::map<EdgeKey, EdgeAttrs> edges_;
    std::map<SensorId, std::set<SensorId>> adjacency_;
};

/// Per-node entry of the fleet representation.
struct NodeStateEntry {
    SensorRole role = SensorRole::half_cycle;
    double weight = 0.5;
    double prob = 0.5;

    bool operator==(const NodeStateEntry&) const = default;
};

using NodeStateTable = std::map<SensorId, NodeStateEntry>;

/// Canonical text form of the whole fleet:
/// `id:role-char:weight:prob` segments in id order joined by `|`.
/// Weight and prob are rendered with exactly two decimals.
std::string encode_system_string(const NodeStateTable& table);

/// Inverse of encode_system_string. Throws StateStringError naming the
/// zero-based segment index on malformed input.
NodeStateTable decode_system_string(std::string_view text);

}  // namespace gnsm
