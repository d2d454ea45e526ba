#include "gnsm/hub.hpp"

#include "gnsm/sensor_node.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gnsm {

namespace {

bool same_signal(const ControlSignal& a, const ControlSignal& b) { return a.target == b.target && a.action == b.action; }

void push_unique(std::vector<ControlSignal>& out, ControlSignal s) {
    if (std::none_of(out.begin(), out.end(), [&](const ControlSignal& o) { return same_signal(o, s); })) {
        out.push_back(std::move(s));
    }
}

}  // namespace

std::vector<ControlSignal> decide(const HubState& state) {
    std::vector<ControlSignal> attack, anomaly, quiet, storage;
    const TimeMs now = state.now_ms;

    std::map<SensorId, double> fractions;
    for (const auto& [id, rec] : state.nodes) fractions[id] = rec.storage_fraction;

    for (const auto& [id, rec] : state.nodes) {
        if (rec.mode == NodeMode::attack) {
            attack.push_back({id, action::SetRole{SensorRole::full_cycle}, now, cause::attack});
            if (state.topology.contains(id)) {
                for (const auto& [peer, attrs] : state.topology.neighbors(id)) {
                    if (state.nodes.count(peer) != 0) attack.push_back({peer, action::Escalate{}, now, cause::attack_neighbor});
                }
            }
        } else if (rec.mode == NodeMode::anomaly) {
            anomaly.push_back({id, action::Escalate{}, now, cause::anomaly});
        } else if (rec.mode == NodeMode::normal && rec.role > state.config.power_save_floor &&
                   now - rec.quiet_since >= state.config.quiet_period_ms) {
            quiet.push_back({id, action::PowerSave{}, now, cause::quiet});
        }

        if (rec.state == SensorState::storage_pressure && !rec.relocation_pending && state.topology.contains(id)) {
            if (auto target = nssm_select(state.topology, id, fractions, state.config.nssm)) {
                storage.push_back({id, action::RelocateStorage{*target}, now, cause::storage});
            }
        }
    }

    std::vector<ControlSignal> out;
    for (auto* group : {&attack, &anomaly, &quiet, &storage}) {
        for (auto& s : *group) push_unique(out, std::move(s));
    }
    return out;
}

UploadPlan schedule_cloud_upload(const std::map<SensorId, NodeStorage>& storage, const UploadPolicy& policy) {
    for (std::size_t i = 0; i < policy.windows.size(); ++i) {
        const auto& w = policy.windows[i];
        if (w.end_ms < w.start_ms) throw ValidationError("upload window ends before it starts");
        if (i > 0 && w.start_ms < policy.windows[i - 1].end_ms) {
            throw ValidationError("upload windows must be ordered and non-overlapping");
        }
    }
    std::vector<std::pair<SensorId, NodeStorage>> order(storage.begin(), storage.end());
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.second.fraction > b.second.fraction; });

    UploadPlan plan;
    std::size_t node = 0;
    std::uint64_t node_left = order.empty() ? 0 : order[0].second.bytes;
    for (std::size_t w = 0; w < policy.windows.size() && node < order.size(); ++w) {
        std::uint64_t budget = policy.max_bytes_per_window;
        while (budget > 0 && node < order.size()) {
            if (node_left == 0) {
                if (++node < order.size()) node_left = order[node].second.bytes;
                continue;
            }
            auto chunk = std::min(budget, node_left);
            plan.push_back({order[node].first, w, policy.windows[w], chunk});
            budget -= chunk;
            node_left -= chunk;
        }
    }
    return plan;
}

Hub::Hub(HubConfig config, const std::vector<SensorId>& fleet, TopologyGraph topology)
    : state_{std::move(config), 0, {}, std::move(topology), {}, 0}, pool_(state_.config.pooling) {
    if (state_.config.quiet_period_ms <= 0) throw ValidationError("quiet period must be > 0");
    if (!(state_.config.weight_decay >= 0.0 && state_.config.weight_decay <= 1.0)) {
        throw ValidationError("weight decay outside [0,1]");
    }
    state_.topology.add_vertex(state_.config.hub_id);
    for (const auto& id : fleet) record_for(id);
}

NodeRecord& Hub::record_for(const SensorId& id) {
    if (id == state_.config.hub_id) throw ValidationError("sensor id collides with hub id");
    auto [it, inserted] = state_.nodes.try_emplace(id);
    if (inserted) {
        it->second.quiet_since = state_.now_ms;
        state_.topology.add_vertex(id);
    }
    return it->second;
}

void Hub::emit(const Message& message) const {
    if (sink_) sink_(frame(message));
}

void Hub::advance_clock(TimeMs now_ms) { state_.now_ms = std::max(state_.now_ms, now_ms); }

bool Hub::ingest_telemetry(const TelemetryMessage& msg) {
    emit(msg);
    advance_clock(msg.sent_at);
    auto& rec = record_for(msg.sender);
    if (rec.last_seq != 0 && msg.seq <= rec.last_seq) {
        ++state_.duplicate_telemetry;
        return false;
    }
    rec.last_seq = msg.seq;
    rec.role = msg.role;
    rec.state = msg.state;
    rec.storage_fraction = msg.storage_used_fraction;
    if (msg.storage_location_changed || msg.state != SensorState::storage_pressure) rec.relocation_pending = false;

    for (const auto& e : msg.neighbor_edges) {
        if (e.peer != state_.config.hub_id) record_for(e.peer);
        state_.topology.set_edge(msg.sender, e.peer, EdgeAttrs{e.hop_weight, e.utilization});
    }

    const bool alerted = msg.anomaly_detected || msg.attack_detected || !msg.alerts.empty();
    const double decay = state_.config.weight_decay;
    rec.weight = std::clamp(decay * rec.weight + (1.0 - decay) * (alerted ? 1.0 : 0.0), 0.0, 1.0);
    if (msg.attack_detected) {
        rec.mode = NodeMode::attack;
    } else if (msg.anomaly_detected) {
        rec.mode = std::max(rec.mode, NodeMode::anomaly);
    } else if (msg.state == SensorState::storage_pressure) {
        rec.mode = std::max(rec.mode, NodeMode::warning);
    } else if (rec.mode == NodeMode::warning) {
        rec.mode = NodeMode::normal;
    }
    if (alerted) rec.quiet_since = std::max(rec.quiet_since, msg.sent_at);
    for (const auto& a : msg.alerts) {
        rec.quiet_since = std::max(rec.quiet_since, a.time_ms);
        pool_.add(a);
    }
    return true;
}

void Hub::acknowledge(const ControlSignal& signal) {
    advance_clock(signal.issued_at);
    auto it = state_.nodes.find(signal.target);
    if (it == state_.nodes.end()) return;
    auto& rec = it->second;
    if (auto role_action = role_action_of(signal.action)) rec.role = apply_control(rec.role, *role_action);
    if (signal.cause == cause::attack || signal.cause == cause::anomaly) {
        if (rec.mode == NodeMode::attack || rec.mode == NodeMode::anomaly) rec.mode = NodeMode::warning;
    }
    if (std::holds_alternative<action::PowerSave>(signal.action)) rec.quiet_since = signal.issued_at;
    if (std::holds_alternative<action::RelocateStorage>(signal.action)) rec.relocation_pending = true;
}

std::vector<ControlSignal> Hub::dispatch(TimeMs now_ms) {
    advance_clock(now_ms);
    std::vector<ControlSignal> out = std::move(state_.pending_signals);
    state_.pending_signals.clear();
    // Operator signals already fix the acknowledged state that decide() sees.
    for (const auto& s : out) acknowledge(s);
    auto autonomous = decide(state_);
    for (const auto& s : autonomous) acknowledge(s);
    out.insert(out.end(), autonomous.begin(), autonomous.end());
    for (const auto& s : out) emit(s);
    return out;
}

NodeStateTable Hub::node_state_table() const {
    NodeStateTable table;
    for (const auto& [id, rec] : state_.nodes) table.emplace(id, NodeStateEntry{rec.role, rec.weight, rec.prob});
    return table;
}

std::vector<HqNodeRow> Hub::node_rows() const {
    std::vector<HqNodeRow> rows;
    for (const auto& [id, rec] : state_.nodes) {
        rows.push_back({id, rec.role, rec.weight, rec.prob, rec.state, rec.mode, rec.storage_fraction});
    }
    return rows;
}

HqResponse Hub::hq_command(const HqCommand& cmd) {
    validate(Message{cmd});
    advance_clock(cmd.issued_at);
    HqResponse response;
    auto control = to_control_action(cmd.action);
    if (!control) {
        response.system_string = system_string();
        response.nodes = node_rows();
        return response;
    }
    if (state_.nodes.count(*cmd.target) == 0) throw UnknownSensorError(*cmd.target);
    if (auto* reloc = std::get_if<action::RelocateStorage>(&*control)) {
        if (state_.nodes.count(reloc->to) == 0) throw UnknownSensorError(reloc->to);
    }
    ControlSignal signal{*cmd.target, *control, state_.now_ms, cause::operator_command};
    state_.pending_signals.push_back(signal);
    response.queued.push_back(std::move(signal));
    return response;
}

HqResponse Hub::handle_hq(const HqCommand& cmd) {
    emit(cmd);
    HqResponse response;
    try {
        response = hq_command(cmd);
    } catch (const UnknownSensorError& e) {
        response = HqResponse{};
        response.ok = false;
        response.error = e.what();
    } catch (const ValidationError& e) {
        response = HqResponse{};
        response.ok = false;
        response.error = e.what();
    }
    emit(response);
    return response;
}

std::map<SensorId, double> Hub::storage_fractions() const {
    std::map<SensorId, double> out;
    for (const auto& [id, rec] : state_.nodes) out[id] = rec.storage_fraction;
    return out;
}

UploadPlan Hub::plan_cloud_upload(const UploadPolicy& policy) const {
    std::map<SensorId, NodeStorage> storage;
    for (const auto& [id, rec] : state_.nodes) {
        auto capacity = rec.capacity_bytes != 0 ? rec.capacity_bytes : state_.config.sensor_capacity_bytes;
        auto bytes = static_cast<std::uint64_t>(std::llround(rec.storage_fraction * static_cast<double>(capacity)));
        storage[id] = NodeStorage{rec.storage_fraction, bytes};
    }
    return schedule_cloud_upload(storage, policy);
}

std::vector<ControlSignal> Hub::upload_signals(const UploadPlan& plan) const {
    std::vector<ControlSignal> out;
    for (const auto& a : plan) {
        push_unique(out, ControlSignal{a.node, action::ScheduleUpload{a.window.start_ms, a.window.end_ms},
                                       state_.now_ms, cause::upload});
    }
    return out;
}

std::vector<ControlSignal> Hub::dispatch_upload(const UploadPolicy& policy, TimeMs now_ms) {
    advance_clock(now_ms);
    auto signals = upload_signals(plan_cloud_upload(policy));
    for (const auto& s : signals) {
        acknowledge(s);
        emit(s);
    }
    return signals;
}

void Hub::set_probability(const SensorId& id, double prob) {
    auto it = state_.nodes.find(id);
    if (it == state_.nodes.end()) throw UnknownSensorError(id);
    if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError("probability outside [0,1]");
    it->second.prob = prob;
}

void Hub::set_capacity(const SensorId& id, std::uint64_t capacity_bytes) {
    auto it = state_.nodes.find(id);
    if (it == state_.nodes.end()) throw UnknownSensorError(id);
    if (capacity_bytes == 0) throw ValidationError("capacity must be > 0");
    it->second.capacity_bytes = capacity_bytes;
}

void Hub::replay(std::span<const std::string> lines) {
    auto sink = std::move(sink_);
    sink_ = nullptr;
    for (const auto& raw : lines) {
        // Accept lines as read back from disk, with or without the newline.
        std::string line = raw;
        if (line.empty() || line.back() != '\n') line += '\n';
        auto tag = peek_type(line);
        if (tag == "TEL") {
            ingest_telemetry(std::get<TelemetryMessage>(parse(line)));
        } else if (tag == "CTL") {
            acknowledge(std::get<ControlSignal>(parse(line)));
        }
    }
    sink_ = std::move(sink);
}

}  // namespace gnsm
