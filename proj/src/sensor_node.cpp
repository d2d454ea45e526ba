#include "gnsm/sensor_node.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gnsm {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        auto pos = line.find('|', begin);
        out.push_back(line.substr(begin, pos == std::string_view::npos ? pos : pos - begin));
        if (pos == std::string_view::npos) return out;
        begin = pos + 1;
    }
}

template <class T>
std::optional<T> number(std::string_view text) {
    T value{};
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

void validate(const DetectionRule& rule) {
    if (rule.severity < 1 || rule.severity > 5) throw ValidationError("rule severity outside 1..5");
    if (rule.type == DetectionRule::Type::signature) {
        if (rule.substring.empty()) throw ValidationError("signature rule with empty substring");
        if (!is_printable(rule.substring)) throw ValidationError("signature substring not printable");
    } else {
        if (!(rule.bytes_per_sec > 0.0)) throw ValidationError("threshold limit must be > 0");
        if (rule.window_ms <= 0) throw ValidationError("threshold window must be > 0");
    }
}

std::vector<DetectionRule> parse_ruleset(std::string_view text) {
    std::vector<DetectionRule> rules;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        auto end = text.find('\n', begin);
        auto raw = text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin);
        begin = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        auto fail = [&](const std::string& why) {
            return ValidationError("ruleset line " + std::to_string(line_no) + ": " + why);
        };
        auto f = split_fields(line);
        DetectionRule rule;
        if (f[0] == "signature") {
            if (f.size() != 4 && f.size() != 5) throw fail("signature rules take 3 or 4 fields");
            rule.type = DetectionRule::Type::signature;
            rule.substring = std::string(f[1]);
            try {
                rule.kind = parse_alert_kind(f[2]);
            } catch (const ValidationError& e) {
                throw fail(e.what());
            }
            auto sev = number<int>(f[3]);
            if (!sev) throw fail("bad severity");
            rule.severity = *sev;
            if (f.size() == 5) {
                if (f[4].substr(0, 6) != "dport=") throw fail("expected dport=<n>");
                auto port = number<unsigned>(f[4].substr(6));
                if (!port || *port > 65535) throw fail("bad dport");
                rule.dst_port = static_cast<std::uint16_t>(*port);
            }
        } else if (f[0] == "threshold") {
            if (f.size() != 4) throw fail("threshold rules take 3 fields");
            rule.type = DetectionRule::Type::threshold;
            auto limit = number<double>(f[1]);
            auto window = number<TimeMs>(f[2]);
            auto sev = number<int>(f[3]);
            if (!limit || !window || !sev) throw fail("bad number");
            rule.bytes_per_sec = *limit;
            rule.window_ms = *window;
            rule.severity = *sev;
        } else {
            throw fail("unknown rule type '" + std::string(f[0]) + "'");
        }
        try {
            validate(rule);
        } catch (const ValidationError& e) {
            throw fail(e.what());
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<DetectionRule> load_ruleset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open ruleset " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ruleset(buf.str());
}

std::string format_rule(const DetectionRule& rule) {
    std::ostringstream out;
    if (rule.type == DetectionRule::Type::signature) {
        out << "signature|" << rule.substring << '|' << to_string(rule.kind) << '|' << rule.severity;
        if (rule.dst_port) out << "|dport=" << *rule.dst_port;
    } else {
        out << "threshold|" << rule.bytes_per_sec << '|' << rule.window_ms << '|' << rule.severity;
    }
    return out.str();
}

SensorRole apply_control(SensorRole role, const RoleAction& act) noexcept {
    auto level = static_cast<int>(role);
    if (std::holds_alternative<action::Escalate>(act)) return static_cast<SensorRole>(std::min(level + 1, 2));
    if (std::holds_alternative<action::PowerSave>(act)) return static_cast<SensorRole>(std::max(level - 1, 0));
    return std::get<action::SetRole>(act).role;
}

std::optional<RoleAction> role_action_of(const ControlAction& act) noexcept {
    if (auto* a = std::get_if<action::Escalate>(&act)) return RoleAction{*a};
    if (auto* a = std::get_if<action::PowerSave>(&act)) return RoleAction{*a};
    if (auto* a = std::get_if<action::SetRole>(&act)) return RoleAction{*a};
    return std::nullopt;
}

std::uint64_t storage_footprint(const CaptureRecord& record, const VolumeModel& model) {
    auto share = [&](double s) { return static_cast<std::uint64_t>(std::llround(static_cast<double>(record.bytes) * s)); };
    switch (record.kind) {
        case RecordKind::flow_record: return share(model.flow_share);
        case RecordKind::pstr_record: return share(model.pstr_share);
        case RecordKind::full_packet: {
            auto side = share(model.flow_share) + share(model.pstr_share);
            return record.bytes > side ? record.bytes - side : 0;
        }
    }
    return 0;
}

bool stores(SensorRole role, RecordKind kind) noexcept {
    return kind == RecordKind::flow_record || role == SensorRole::full_cycle;
}

double storage_growth_rate(SensorRole role, double offered_bytes_per_day, const VolumeModel& model) {
    if (offered_bytes_per_day <= 0.0) return 0.0;
    if (role == SensorRole::full_cycle) return offered_bytes_per_day;
    return offered_bytes_per_day * model.flow_share;
}

std::vector<Alert> detect(const SensorId& source, std::span<const CaptureRecord> records,
                          std::span<const DetectionRule> rules, TimeMs now_ms) {
    std::vector<Alert> alerts;
    for (const auto& rule : rules) {
        if (rule.type == DetectionRule::Type::signature) {
            std::set<FlowKey> fired;
            for (const auto& r : records) {
                if (r.kind != RecordKind::pstr_record) continue;
                if (rule.dst_port && r.key.dst_port != *rule.dst_port) continue;
                if (r.excerpt.find(rule.substring) != std::string::npos) fired.insert(r.key);
            }
            for (const auto& key : fired) {
                alerts.push_back(Alert{source, now_ms, rule.kind, rule.severity, key, kSignatureConfidence});
            }
        } else {
            std::map<FlowKey, std::uint64_t> bytes;
            for (const auto& r : records) {
                if (r.kind != RecordKind::flow_record) continue;
                if (r.end_ms > now_ms - rule.window_ms && r.end_ms <= now_ms) bytes[r.key] += r.bytes;
            }
            double window_s = static_cast<double>(rule.window_ms) / 1000.0;
            for (const auto& [key, total] : bytes) {
                double rate = static_cast<double>(total) / window_s;
                if (rate > rule.bytes_per_sec) {
                    alerts.push_back(Alert{source, now_ms, AlertKind::anomaly, rule.severity, key,
                                           1.0 - rule.bytes_per_sec / rate});
                }
            }
        }
    }
    return alerts;
}

SensorNode::SensorNode(SensorId id, SensorRole initial_role, SensorConfig config, std::vector<DetectionRule> rules)
    : id_(std::move(id)), role_(initial_role), config_(config), rules_(std::move(rules)) {
    if (id_.empty()) throw ValidationError("sensor without id");
    if (config_.capacity_bytes == 0) throw ValidationError("sensor storage capacity must be positive");
    if (!(config_.pressure_threshold > 0.0 && config_.pressure_threshold <= 1.0)) {
        throw ValidationError("pressure threshold outside (0,1]");
    }
    for (const auto& r : rules_) validate(r);
}

double SensorNode::storage_fraction() const noexcept {
    return static_cast<double>(storage_used_) / static_cast<double>(config_.capacity_bytes);
}

bool SensorNode::in_transition(TimeMs t) const noexcept {
    return transition_from_ && t >= *transition_from_ && t < *transition_until_;
}

TransitionEvent SensorNode::begin_transition(SensorRole new_role, TimeMs now_ms, TimeMs latency_ms) {
    if (latency_ms < 0 || latency_ms > kMaxTransitionLatencyMs) {
        throw ValidationError("transition latency " + std::to_string(latency_ms) + " ms outside [0, 35000]");
    }
    const bool running = transition_until_ && *transition_until_ > now_ms;
    const TimeMs start = running ? *transition_until_ : now_ms;
    TransitionEvent ev{id_, role_, new_role, now_ms, start, start + latency_ms};
    if (latency_ms > 0) {
        if (!running) transition_from_ = start;
        transition_until_ = ev.drop_end_ms;
    }
    role_ = new_role;
    return ev;
}

CaptureResult SensorNode::step_capture(std::span<const CaptureRecord> offered, TimeMs now_ms, TimeMs dt_ms) {
    if (dt_ms <= 0) throw ValidationError("capture step must be > 0 ms");
    CaptureResult result;
    std::vector<CaptureRecord> seen;
    seen.reserve(offered.size());
    for (const auto& record : offered) {
        if (in_transition(record.start_ms)) {
            ++result.dropped_in_transition;
            continue;
        }
        seen.push_back(record);
        if (!stores(role_, record.kind)) continue;
        auto size = storage_footprint(record, config_.volume);
        if (storage_used_ + size > config_.capacity_bytes) {
            ++result.dropped_storage;
            storage_overflowed_ = true;
            continue;
        }
        storage_used_ += size;
        result.stored.push_back(record);
    }

    const TimeMs step_end = now_ms + dt_ms;
    TimeMs max_window = 0;
    for (const auto& r : rules_) {
        if (r.type == DetectionRule::Type::threshold) max_window = std::max(max_window, r.window_ms);
    }
    for (const auto& r : seen) {
        if (r.kind == RecordKind::flow_record && max_window > 0) flow_history_.push_back(r);
    }
    while (!flow_history_.empty() && flow_history_.front().end_ms <= step_end - max_window) {
        flow_history_.pop_front();
    }

    if (role_ >= SensorRole::half_cycle && !rules_.empty()) {
        // Threshold rules need the retained flow window; signature rules only
        // look at PSTR records, which never enter the history.
        std::vector<CaptureRecord> view(flow_history_.begin(), flow_history_.end());
        for (const auto& r : seen) {
            if (r.kind != RecordKind::flow_record || max_window == 0) view.push_back(r);
        }
        result.alerts = detect(id_, view, rules_, step_end);
        pending_alerts_.insert(pending_alerts_.end(), result.alerts.begin(), result.alerts.end());
    }
    return result;
}

SensorState SensorNode::state(TimeMs now_ms) const noexcept {
    if (storage_overflowed_ || storage_fraction() >= config_.pressure_threshold) return SensorState::storage_pressure;
    if (in_transition(now_ms)) return SensorState::degraded;
    return SensorState::ok;
}

TelemetryMessage SensorNode::emit_telemetry(std::vector<NeighborEdge> neighbor_edges, TimeMs now_ms) {
    TelemetryMessage msg;
    msg.sender = id_;
    msg.seq = ++telemetry_seq_;
    msg.sent_at = now_ms;
    msg.state = state(now_ms);
    msg.role = role_;
    for (const auto& a : pending_alerts_) {
        if (a.kind == AlertKind::attack_attempt) msg.attack_detected = true;
        if (a.kind == AlertKind::anomaly) msg.anomaly_detected = true;
    }
    msg.neighbor_edges = std::move(neighbor_edges);
    msg.storage_used_fraction = std::clamp(storage_fraction(), 0.0, 1.0);
    msg.storage_location_changed = storage_moved_;
    msg.alerts = std::move(pending_alerts_);
    pending_alerts_.clear();
    storage_moved_ = false;
    if (storage_fraction() < config_.pressure_threshold) storage_overflowed_ = false;
    return msg;
}

std::uint64_t SensorNode::release_storage(std::uint64_t bytes) noexcept {
    auto freed = std::min(bytes, storage_used_);
    storage_used_ -= freed;
    return freed;
}

std::uint64_t SensorNode::absorb_storage(std::uint64_t bytes, double ceiling_fraction) noexcept {
    auto ceiling = static_cast<std::uint64_t>(static_cast<double>(config_.capacity_bytes) * std::clamp(ceiling_fraction, 0.0, 1.0));
    if (storage_used_ >= ceiling) return 0;
    auto accepted = std::min(bytes, ceiling - storage_used_);
    storage_used_ += accepted;
    return accepted;
}

}  // namespace gnsm
