#include "gnsm/simulator.hpp"

#include "gnsm/ga_advisor.hpp"
#include "gnsm/hub.hpp"
#include "json_codec.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <set>

namespace gnsm {

using codec::json;

std::uint64_t flow_line_backup_coverage(const TopologyGraph& topology, std::span<const SensorId> flow_line,
                                        const std::map<SensorId, std::vector<Interval>>& transitions,
                                        std::span<const TimeMs> packet_times) {
    if (flow_line.empty()) throw ValidationError("flow line without sensors");
    for (const auto& id : flow_line) {
        if (!topology.contains(id)) throw ValidationError("flow line sensor " + id.str() + " not in topology");
    }
    auto in_transition = [&](const SensorId& id, TimeMs t) {
        auto it = transitions.find(id);
        if (it == transitions.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(), [&](const Interval& iv) { return iv.contains(t); });
    };
    std::uint64_t dropped = 0;
    for (TimeMs t : packet_times) {
        if (std::all_of(flow_line.begin(), flow_line.end(), [&](const SensorId& id) { return in_transition(id, t); })) {
            ++dropped;
        }
    }
    return dropped;
}

TopologyGraph build_topology(const Scenario& scenario) {
    TopologyGraph g;
    g.add_vertex(SensorId("hub"));
    for (const auto& s : scenario.sensors) g.add_vertex(s.id);
    for (const auto& e : scenario.edges) g.set_edge(e.a, e.b, EdgeAttrs{e.hop_weight, e.utilization});
    return g;
}

namespace {

constexpr TimeMs kDayMs = 86'400'000;
constexpr TimeMs kHourMs = 3'600'000;
// Daily upload planning runs once the first telemetry round has landed.
constexpr TimeMs kUploadPlanOffsetMs = 1'800'000;

const char* const kBenignExcerpts[] = {
    "GET /index.html HTTP/1.1",       "POST /api/v1/telemetry HTTP/1.1", "GET /favicon.ico HTTP/1.1",
    "USER operator",                  "EHLO mail.plant.local",           "GET /reports/daily.csv HTTP/1.1",
    "SSH-2.0-OpenSSH_8.9",            "GET /status HTTP/1.1",
};
constexpr const char* kNoiseExcerpt = "GET /..%c0%af../etc/passwd%00";

enum class EvKind : std::uint8_t { capture, telemetry, decision, deliver, upload_plan, upload_start, advisor, end };

struct QueuedEvent {
    TimeMs t;
    std::uint64_t seq;
    EvKind kind;
    std::size_t index;
    bool operator>(const QueuedEvent& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct UploadJob {
    SensorId node;
    std::uint64_t bytes;
};

struct Episode {
    TimeMs start_ms = 0;
    std::string before;
    Genome actions;
    bool escalated = false;
    std::uint64_t true_confirmed = 0;
};

class Simulation {
public:
    Simulation(const Scenario& s, const SimOptions& options)
        : s_(s),
          options_(options),
          rng_(s.seed),
          topology_(build_topology(s)),
          hub_(hub_config(s), fleet_ids(s), topology_),
          ledger_(s.energy) {
        for (const auto& spec : s.sensors) {
            SensorConfig cfg{spec.capacity_bytes, s.storage.pressure_threshold, s.storage.volume};
            SensorRole initial =
                s.role_management == RoleManagement::pinned_full ? SensorRole::full_cycle : SensorRole::half_cycle;
            auto [it, _] = nodes_.emplace(spec.id, SensorNode(spec.id, initial, cfg, s.rules));
            it->second.absorb_storage(spec.initial_used_bytes, 1.0);
            hub_.set_capacity(spec.id, spec.capacity_bytes);
            role_since_[spec.id] = 0;
            sites_[spec.id] = spec.site;
        }
        for (const auto& e : s.edges) {
            if (nodes_.count(e.a)) edges_[e.a].push_back({e.b, e.hop_weight, e.utilization});
            if (nodes_.count(e.b)) edges_[e.b].push_back({e.a, e.hop_weight, e.utilization});
        }
        lines_ = s.resolved_flow_lines();
        for (const auto& r : s.rules) {
            if (r.type == DetectionRule::Type::threshold) max_rule_window_ = std::max(max_rule_window_, r.window_ms);
        }
        slack_ms_ = s.capture_step_ms + max_rule_window_;
        for (const auto& ev : s.events) truth_.push_back({ev.id, ev.at_ms, ev.duration_ms, ev.kind, ev.key});
        if (options_.keep_log) hub_.set_sink([this](const std::string& line) { append(line); });
        std::vector<SensorId> fleet = fleet_ids(s);
        population_ = random_population(fleet, s.ga.params.pop_size, rng_());
    }

    SimResult execute() {
        log_start();
        report_.power_timeline_uw.push_back({0, fleet_uw()});
        episode_ = Episode{0, hub_.system_string(), {}, false, 0};

        const TimeMs end = s_.duration_ms;
        push(std::min(s_.capture_step_ms, end), EvKind::capture, 0);
        push(std::min(s_.telemetry_interval_ms, end), EvKind::telemetry, 0);
        push(std::min(s_.decision_interval_ms, end), EvKind::decision, 0);
        if (kUploadPlanOffsetMs <= end) push(kUploadPlanOffsetMs, EvKind::upload_plan, 0);
        if (s_.ga.interval_ms <= end) push(s_.ga.interval_ms, EvKind::advisor, 0);
        queue_.push({end, UINT64_MAX, EvKind::end, 0});

        while (!queue_.empty()) {
            auto ev = queue_.top();
            queue_.pop();
            now_ = ev.t;
            switch (ev.kind) {
                case EvKind::capture: on_capture(); break;
                case EvKind::telemetry: on_telemetry(); break;
                case EvKind::decision: on_decision(); break;
                case EvKind::deliver: on_deliver(deliveries_[ev.index]); break;
                case EvKind::upload_plan: on_upload_plan(); break;
                case EvKind::upload_start: on_upload_start(uploads_[ev.index]); break;
                case EvKind::advisor: on_advisor(); break;
                case EvKind::end: on_end(); break;
            }
        }
        finalize(report_);
        if (options_.keep_log) report_.log_sha256 = log_sha256(log_);
        return SimResult{std::move(log_), std::move(report_), std::move(transitions_)};
    }

private:
    static HubConfig hub_config(const Scenario& s) {
        HubConfig c;
        c.quiet_period_ms = s.hub.quiet_period_ms;
        c.power_save_floor = s.hub.power_save_floor;
        c.nssm = NssmParams{s.hub.alpha, s.hub.storage_ceiling};
        c.pooling = s.pooling;
        c.weight_decay = s.hub.weight_decay;
        return c;
    }

    static std::vector<SensorId> fleet_ids(const Scenario& s) {
        std::vector<SensorId> ids;
        for (const auto& spec : s.sensors) ids.push_back(spec.id);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    void push(TimeMs t, EvKind kind, std::size_t index) { queue_.push({t, next_seq_++, kind, index}); }

    void append(std::string line) {
        if (!line.empty() && line.back() == '\n') line.pop_back();
        log_.push_back(std::move(line));
    }

    void sim(json body) {
        if (options_.keep_log) append(codec::envelope_line("SIM", std::move(body)));
    }

    std::int64_t fleet_uw() const {
        std::int64_t total = 0;
        for (const auto& [id, node] : nodes_) total += power_draw_uw(node.role(), s_.energy);
        return total;
    }

    void log_start() {
        report_.seed = s_.seed;
        report_.duration_ms = s_.duration_ms;
        report_.sensors = s_.sensors.size();
        report_.role_management = s_.role_management == RoleManagement::hub ? "hub" : "pinned_full";
        report_.energy_profile = s_.energy;
        report_.events_injected = truth_.size();
        json sensors = json::array();
        for (const auto& [id, node] : nodes_) sensors.push_back({{"id", id.str()}, {"role", std::string(to_string(node.role()))}});
        const auto& e = s_.energy;
        sim({{"kind", "start"},
             {"seed", s_.seed},
             {"duration", s_.duration_ms},
             {"role_management", report_.role_management},
             {"slack", slack_ms_},
             {"energy",
              {{"collection_w", e.collection_w},
               {"half_w", e.half_w},
               {"full_w", e.full_w},
               {"legacy_sensor_w", e.legacy_sensor_w},
               {"infrastructure_w", e.infrastructure_w},
               {"co2_mg_per_kwh", e.co2_mg_per_kwh}}},
             {"sensors", sensors}});
        for (const auto& ev : s_.events) {
            json ids = json::array();
            for (const auto& id : ev.sensors) ids.push_back(id.str());
            sim({{"kind", "inject"},
                 {"id", ev.id},
                 {"at", ev.at_ms},
                 {"duration", ev.duration_ms},
                 {"event_kind", std::string(to_string(ev.kind))},
                 {"flow", codec::encode(ev.key)},
                 {"sensors", ids}});
        }
    }

    bool is_true_alert(const FlowKey& key, TimeMs t) const {
        return std::any_of(truth_.begin(), truth_.end(), [&](const TruthEvent& ev) { return matches_event(key, t, ev, slack_ms_); });
    }

    FlowKey random_key(std::uint32_t net) {
        std::uniform_int_distribution<std::uint32_t> host(1, 0xfffe);
        std::uniform_int_distribution<int> port(1024, 65535);
        const std::uint16_t services[] = {80, 443, 22, 25, 502, 8080};
        std::uniform_int_distribution<std::size_t> svc(0, std::size(services) - 1);
        return FlowKey{net | host(rng_), (10u << 24) | (200u << 16) | host(rng_), static_cast<std::uint16_t>(port(rng_)),
                       services[svc(rng_)], 6};
    }

    static void session_records(std::vector<CaptureRecord>& out, const FlowKey& key, TimeMs start, TimeMs end,
                                std::uint64_t bytes, std::string excerpt) {
        std::uint64_t packets = std::max<std::uint64_t>(1, bytes / 1000);
        bytes = std::max(bytes, packets);
        out.push_back({RecordKind::flow_record, key, start, end, bytes, packets, 0, {}});
        out.push_back({RecordKind::full_packet, key, start, end, bytes, packets, bytes, {}});
        out.push_back({RecordKind::pstr_record, key, start, end, bytes, packets, 0, std::move(excerpt)});
    }

    void on_capture() {
        const TimeMs t0 = last_capture_;
        const TimeMs dt = now_ - t0;
        last_capture_ = now_;
        if (now_ < s_.duration_ms) push(std::min(now_ + s_.capture_step_ms, s_.duration_ms), EvKind::capture, 0);
        if (dt <= 0) return;

        std::map<SensorId, std::vector<CaptureRecord>> offered;
        std::uint64_t sessions = 0, packets = 0, line_dropped = 0, noise = 0;
        std::uniform_int_distribution<TimeMs> offset(0, dt - 1);
        std::uniform_int_distribution<TimeMs> length(100, 30'000);
        std::uniform_int_distribution<std::size_t> excerpt(0, std::size(kBenignExcerpts) - 1);

        for (std::size_t li = 0; li < lines_.size(); ++li) {
            const auto& line = lines_[li];
            auto profile = s_.profile_for(sites_.at(line.front()));
            double mean = profile.sessions_per_sec * profile.multiplier_at(t0) * static_cast<double>(dt) / 1000.0;
            std::uint64_t n = mean > 0.0 ? std::poisson_distribution<std::uint64_t>(mean)(rng_) : 0;
            std::exponential_distribution<double> size(1.0 / profile.mean_session_bytes);
            std::vector<CaptureRecord> records;
            for (std::uint64_t k = 0; k < n; ++k) {
                TimeMs start = t0 + offset(rng_);
                TimeMs stop = std::min(start + length(rng_), now_ - 1);
                auto bytes = static_cast<std::uint64_t>(std::max(1.0, std::round(size(rng_))));
                auto key = random_key((10u << 24) | (static_cast<std::uint32_t>(li + 1) << 16));
                session_records(records, key, start, stop, bytes, kBenignExcerpts[excerpt(rng_)]);
                const auto pk = records.back().packets;
                packets += pk;
                if (std::all_of(line.begin(), line.end(), [&](const SensorId& id) { return nodes_.at(id).in_transition(start); })) {
                    line_dropped += pk;
                }
            }
            sessions += n;
            for (const auto& id : line) offered[id] = records;
        }

        std::bernoulli_distribution noisy(s_.nic_noise_rate);
        for (const auto& [id, node] : nodes_) {
            if (s_.nic_noise_rate > 0.0 && noisy(rng_)) {
                TimeMs start = t0 + offset(rng_);
                auto key = random_key((172u << 24) | (16u << 16));
                offered[id].push_back({RecordKind::pstr_record, key, start, start, 64, 1, 0, kNoiseExcerpt});
                ++noise;
            }
        }

        for (const auto& ev : s_.events) {
            TimeMs from = std::max(t0, ev.at_ms);
            TimeMs to = std::min(now_, ev.at_ms + ev.duration_ms);
            if (from >= to) continue;
            std::vector<CaptureRecord> records;
            if (ev.kind == AlertKind::attack_attempt) {
                session_records(records, ev.key, from, to - 1, 4096 + ev.payload.size(), ev.payload);
            } else {
                auto bytes = static_cast<std::uint64_t>(ev.bytes_per_sec * static_cast<double>(to - from) / 1000.0);
                session_records(records, ev.key, from, to - 1, std::max<std::uint64_t>(bytes, 1), "");
                records.pop_back();
            }
            for (const auto& id : ev.sensors) {
                auto& dst = offered[id];
                dst.insert(dst.end(), records.begin(), records.end());
            }
        }

        std::uint64_t dropped_t = 0, dropped_s = 0, stored_bytes = 0;
        for (auto& [id, node] : nodes_) {
            auto it = offered.find(id);
            static const std::vector<CaptureRecord> kNone;
            const auto& recs = it == offered.end() ? kNone : it->second;
            auto before = node.storage_used();
            auto result = node.step_capture(recs, t0, dt);
            dropped_t += result.dropped_in_transition;
            dropped_s += result.dropped_storage;
            stored_bytes += node.storage_used() - before;
            report_.alerts_raw += result.alerts.size();
            for (const auto& a : result.alerts) {
                if (is_true_alert(a.key, a.time_ms)) ++report_.alerts_raw_true;
            }
        }

        report_.sessions_offered += sessions;
        report_.packets_offered += packets;
        report_.line_packets_dropped += line_dropped;
        report_.records_dropped_transition += dropped_t;
        report_.records_dropped_storage += dropped_s;
        report_.bytes_stored += stored_bytes;
        report_.nic_noise_records += noise;
        if (sessions || dropped_t || dropped_s || stored_bytes || noise) {
            sim({{"kind", "capture"},
                 {"at", now_},
                 {"sessions", sessions},
                 {"packets", packets},
                 {"line_dropped", line_dropped},
                 {"dropped_transition", dropped_t},
                 {"dropped_storage", dropped_s},
                 {"stored_bytes", stored_bytes},
                 {"noise", noise}});
        }
    }

    void send_telemetry() {
        for (auto& [id, node] : nodes_) {
            auto it = edges_.find(id);
            hub_.ingest_telemetry(node.emit_telemetry(it == edges_.end() ? std::vector<NeighborEdge>{} : it->second, now_));
        }
    }

    void on_telemetry() {
        send_telemetry();
        if (now_ < s_.duration_ms) push(std::min(now_ + s_.telemetry_interval_ms, s_.duration_ms), EvKind::telemetry, 0);
    }

    void record_confirmed(const std::vector<ConfirmedAlert>& confirmed) {
        for (const auto& c : confirmed) {
            ++report_.alerts_confirmed;
            report_.confirmed_times.push_back(c.last_ms);
            bool hit = false;
            for (std::size_t i = 0; i < truth_.size(); ++i) {
                const auto& ev = truth_[i];
                if (confirmed_matches_event(c.key, c.first_ms, c.last_ms, ev, slack_ms_)) {
                    hit = true;
                    detected_.insert(i);
                }
            }
            if (hit) {
                ++report_.alerts_confirmed_true;
                ++episode_.true_confirmed;
            }
            json sensors = json::array();
            for (const auto& id : c.sensors) sensors.push_back(id.str());
            sim({{"kind", "confirmed"},
                 {"flow", codec::encode(c.key)},
                 {"first", c.first_ms},
                 {"last", c.last_ms},
                 {"alert_kind", std::string(to_string(c.kind))},
                 {"severity", c.max_severity},
                 {"confidence", c.mean_confidence},
                 {"count", c.alert_count},
                 {"gated", c.gated},
                 {"sensors", sensors}});
        }
        report_.events_detected = detected_.size();
    }

    void count_signal(const ControlSignal& s) {
        ++report_.control_signals;
        if (std::holds_alternative<action::PowerSave>(s.action)) ++report_.power_save_signals;
    }

    void on_decision() {
        record_confirmed(hub_.alert_pool().release(now_, s_.telemetry_interval_ms));
        for (const auto& signal : hub_.dispatch(now_)) {
            count_signal(signal);
            if (auto ra = role_action_of(signal.action)) {
                AdviceAction a = AdviceAction::hold;
                if (std::holds_alternative<action::PowerSave>(*ra)) {
                    a = AdviceAction::power_save;
                } else {
                    a = AdviceAction::escalate;
                    episode_.escalated = true;
                }
                episode_.actions[signal.target] = a;
            }
            schedule_delivery(signal);
        }
        if (now_ < s_.duration_ms) push(std::min(now_ + s_.decision_interval_ms, s_.duration_ms), EvKind::decision, 0);
    }

    void schedule_delivery(const ControlSignal& signal) {
        const TimeMs at = now_ + s_.control_latency_ms;
        if (at > s_.duration_ms) return;
        deliveries_.push_back(signal);
        push(at, EvKind::deliver, deliveries_.size() - 1);
    }

    void close_energy(const SensorId& id, const SensorNode& node) {
        TimeMs from = role_since_[id];
        if (now_ <= from) return;
        ledger_.accumulate(id, node.role(), now_ - from);
        sim({{"kind", "energy"}, {"node", id.str()}, {"role", std::string(to_string(node.role()))}, {"from", from}, {"to", now_}});
        role_since_[id] = now_;
    }

    void on_deliver(const ControlSignal& signal) {
        auto it = nodes_.find(signal.target);
        if (it == nodes_.end()) return;
        auto& node = it->second;
        if (auto ra = role_action_of(signal.action)) {
            if (s_.role_management == RoleManagement::pinned_full) return;
            SensorRole next = apply_control(node.role(), *ra);
            if (next == node.role()) return;
            close_energy(signal.target, node);
            std::uniform_int_distribution<TimeMs> latency(s_.latency_min_ms, s_.latency_max_ms);
            auto tr = node.begin_transition(next, now_, latency(rng_));
            ++report_.transitions;
            report_.transition_drop_ms += tr.drop_length();
            report_.power_timeline_uw.push_back({now_, fleet_uw()});
            sim({{"kind", "transition"},
                 {"sensor", tr.sensor.str()},
                 {"from", std::string(to_string(tr.from))},
                 {"to", std::string(to_string(tr.to))},
                 {"at", now_},
                 {"drop_start", tr.drop_start_ms},
                 {"drop_end", tr.drop_end_ms}});
            transitions_.push_back(std::move(tr));
        } else if (auto* reloc = std::get_if<action::RelocateStorage>(&signal.action)) {
            auto target = nodes_.find(reloc->to);
            if (target == nodes_.end()) return;
            auto accepted = target->second.absorb_storage(node.storage_used() / 2, s_.hub.storage_ceiling);
            node.release_storage(accepted);
            node.mark_storage_relocated();
            ++report_.relocations;
            report_.bytes_relocated += accepted;
            sim({{"kind", "relocation"}, {"from", signal.target.str()}, {"to", reloc->to.str()}, {"at", now_}, {"bytes", accepted}});
        } else if (auto* up = std::get_if<action::ScheduleUpload>(&signal.action)) {
            auto planned = planned_uploads_.find({signal.target, up->window_start_ms});
            if (planned == planned_uploads_.end()) return;
            uploads_.push_back({signal.target, planned->second});
            planned_uploads_.erase(planned);
            TimeMs at = std::max(up->window_start_ms, now_);
            if (at <= s_.duration_ms) push(at, EvKind::upload_start, uploads_.size() - 1);
        }
    }

    void on_upload_plan() {
        const TimeMs day = now_ - kUploadPlanOffsetMs;
        UploadPolicy policy;
        policy.max_bytes_per_window = s_.upload.max_bytes_per_window;
        for (const auto& w : s_.upload.windows_h) {
            policy.windows.push_back({day + static_cast<TimeMs>(w.from_h * kHourMs), day + static_cast<TimeMs>(w.to_h * kHourMs)});
        }
        for (const auto& a : hub_.plan_cloud_upload(policy)) planned_uploads_[{a.node, a.window.start_ms}] += a.bytes;
        for (const auto& signal : hub_.dispatch_upload(policy, now_)) {
            count_signal(signal);
            schedule_delivery(signal);
        }
        if (now_ + kDayMs <= s_.duration_ms) push(now_ + kDayMs, EvKind::upload_plan, 0);
    }

    void on_upload_start(const UploadJob& job) {
        auto freed = nodes_.at(job.node).release_storage(job.bytes);
        ++report_.uploads;
        report_.bytes_uploaded += freed;
        sim({{"kind", "upload"}, {"node", job.node.str()}, {"at", now_}, {"bytes", freed}});
    }

    void close_episode() {
        bool missed = false;
        for (std::size_t i = 0; i < truth_.size(); ++i) {
            const auto& ev = truth_[i];
            bool overlaps = ev.at_ms < now_ && ev.at_ms + ev.duration_ms > episode_.start_ms;
            if (overlaps && !detected_.count(i)) missed = true;
        }
        bool good = !missed && !(episode_.escalated && episode_.true_confirmed == 0);
        LabeledEpisode ep;
        ep.before = episode_.before;
        for (const auto& [id, node] : nodes_) {
            auto it = episode_.actions.find(id);
            ep.actions[id] = it == episode_.actions.end() ? AdviceAction::hold : it->second;
        }
        ep.label = good ? EpisodeLabel::good : EpisodeLabel::bad;
        ep.alerts_confirmed = episode_.true_confirmed;
        history_.push_back(std::move(ep));
    }

    void on_advisor() {
        close_episode();
        const auto current = hub_.system_string();
        population_ = evolve(population_, s_.ga.params, rng_(), FitnessContext{history_, current});
        auto items = advise(hub_.node_state_table(), population_, history_);
        for (const auto& [id, node] : nodes_) {
            std::size_t votes = 0;
            for (const auto& g : population_) {
                auto it = g.find(id);
                if (it != g.end() && it->second == AdviceAction::escalate) ++votes;
            }
            hub_.set_probability(id, static_cast<double>(votes) / static_cast<double>(population_.size()));
        }
        ++report_.advice_items;
        sim({{"kind", "advice"},
             {"at", now_},
             {"system", current},
             {"genome", encode_genome(items.front().actions)},
             {"fitness", items.front().fitness}});
        episode_ = Episode{now_, hub_.system_string(), {}, false, 0};
        if (now_ + s_.ga.interval_ms <= s_.duration_ms) push(now_ + s_.ga.interval_ms, EvKind::advisor, 0);
    }

    void on_end() {
        send_telemetry();
        record_confirmed(hub_.alert_pool().flush());
        for (const auto& [id, node] : nodes_) close_energy(id, node);
        report_.node_uwms = ledger_.per_node_uwms();
        report_.fleet_uwms = ledger_.fleet_uwms();
        sim({{"kind", "end"}, {"at", now_}});
    }

    const Scenario& s_;
    SimOptions options_;
    std::mt19937_64 rng_;
    TopologyGraph topology_;
    Hub hub_;
    EnergyLedger ledger_;
    std::map<SensorId, SensorNode> nodes_;
    std::map<SensorId, Site> sites_;
    std::map<SensorId, std::vector<NeighborEdge>> edges_;
    std::map<SensorId, TimeMs> role_since_;
    std::vector<std::vector<SensorId>> lines_;
    TimeMs max_rule_window_ = 0;
    TimeMs slack_ms_ = 0;
    std::vector<TruthEvent> truth_;
    std::set<std::size_t> detected_;

    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue_;
    std::uint64_t next_seq_ = 0;
    TimeMs now_ = 0;
    TimeMs last_capture_ = 0;
    std::vector<ControlSignal> deliveries_;
    std::map<std::pair<SensorId, TimeMs>, std::uint64_t> planned_uploads_;
    std::vector<UploadJob> uploads_;

    std::vector<Genome> population_;
    std::vector<LabeledEpisode> history_;
    Episode episode_;

    std::vector<std::string> log_;
    Report report_;
    std::vector<TransitionEvent> transitions_;
};

}  // namespace

SimResult run(const Scenario& scenario, const SimOptions& options) {
    validate(scenario);
    return Simulation(scenario, options).execute();
}

}  // namespace gnsm
