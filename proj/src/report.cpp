#include "gnsm/report.hpp"

#include "gnsm/messaging.hpp"
#include "json_codec.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <openssl/evp.h>
#include <set>
#include <sstream>

namespace gnsm {

using codec::json;

bool matches_event(const FlowKey& key, TimeMs t_ms, const TruthEvent& event, TimeMs slack_ms) noexcept {
    return key == event.key && t_ms >= event.at_ms && t_ms <= event.at_ms + event.duration_ms + slack_ms;
}

bool confirmed_matches_event(const FlowKey& key, TimeMs first_ms, TimeMs last_ms, const TruthEvent& event,
                             TimeMs slack_ms) noexcept {
    return key == event.key && last_ms >= event.at_ms && first_ms <= event.at_ms + event.duration_ms + slack_ms;
}

void finalize(Report& r) {
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.precision_raw = ratio(r.alerts_raw_true, r.alerts_raw);
    r.precision_confirmed = ratio(r.alerts_confirmed_true, r.alerts_confirmed);
    r.recall = ratio(r.events_detected, r.events_injected);

    const auto& p = r.energy_profile;
    const double hours = static_cast<double>(r.duration_ms) / 3.6e6;
    r.fleet_wh = static_cast<double>(r.fleet_uwms) / kUwMsPerWh;
    r.iot_kwh = (r.fleet_wh + p.infrastructure_w * hours) / 1000.0;
    r.legacy_kwh = p.legacy_sensor_w * static_cast<double>(r.sensors) * hours / 1000.0;
    r.saving_percent = r.legacy_kwh > 0.0 ? fleet_saving_percent(r.legacy_kwh, r.iot_kwh) : 0.0;
    r.co2_saved_mg = co2_saved_mg(std::max(0.0, r.legacy_kwh - r.iot_kwh), p.co2_mg_per_kwh);
    r.co2_saved_mg_per_hour = hours > 0.0 ? r.co2_saved_mg / hours : 0.0;
}

std::string report_to_json(const Report& r) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json nodes = json::object();
    for (const auto& [id, uwms] : r.node_uwms) nodes[id.str()] = uwms;
    json timeline = json::array();
    for (const auto& [t, uw] : r.power_timeline_uw) timeline.push_back(json::array({t, uw}));
    const auto& p = r.energy_profile;
    json j{
        {"seed", r.seed},
        {"duration_ms", r.duration_ms},
        {"sensors", r.sensors},
        {"role_management", r.role_management},
        {"traffic",
         {{"sessions_offered", r.sessions_offered},
          {"packets_offered", r.packets_offered},
          {"line_packets_dropped", r.line_packets_dropped},
          {"records_dropped_transition", r.records_dropped_transition},
          {"records_dropped_storage", r.records_dropped_storage},
          {"bytes_stored", r.bytes_stored},
          {"nic_noise_records", r.nic_noise_records}}},
        {"control",
         {{"transitions", r.transitions},
          {"transition_drop_ms", r.transition_drop_ms},
          {"signals", r.control_signals},
          {"power_save_signals", r.power_save_signals},
          {"relocations", r.relocations},
          {"bytes_relocated", r.bytes_relocated},
          {"uploads", r.uploads},
          {"bytes_uploaded", r.bytes_uploaded},
          {"advice_items", r.advice_items}}},
        {"alerts",
         {{"raw", r.alerts_raw},
          {"raw_true", r.alerts_raw_true},
          {"confirmed", r.alerts_confirmed},
          {"confirmed_true", r.alerts_confirmed_true},
          {"events_injected", r.events_injected},
          {"events_detected", r.events_detected},
          {"precision_raw", opt(r.precision_raw)},
          {"precision_confirmed", opt(r.precision_confirmed)},
          {"recall", opt(r.recall)},
          {"confirmed_times", r.confirmed_times}}},
        {"energy",
         {{"profile",
           {{"collection_w", p.collection_w},
            {"half_w", p.half_w},
            {"full_w", p.full_w},
            {"legacy_sensor_w", p.legacy_sensor_w},
            {"infrastructure_w", p.infrastructure_w},
            {"co2_mg_per_kwh", p.co2_mg_per_kwh}}},
          {"node_uwms", nodes},
          {"fleet_uwms", r.fleet_uwms},
          {"fleet_wh", r.fleet_wh},
          {"iot_kwh", r.iot_kwh},
          {"legacy_kwh", r.legacy_kwh},
          {"saving_percent", r.saving_percent},
          {"co2_saved_mg", r.co2_saved_mg},
          {"co2_saved_mg_per_hour", r.co2_saved_mg_per_hour},
          {"power_timeline_uw", timeline}}},
        {"log_sha256", r.log_sha256},
    };
    return j.dump(2) + "\n";
}

std::string format_summary(const Report& r) {
    auto pct = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string("n/a"); };
    std::string out;
    out += fmt::format("run: seed {} | {:.2f} h | {} sensors | role management {}\n", r.seed,
                       static_cast<double>(r.duration_ms) / 3.6e6, r.sensors, r.role_management);
    out += fmt::format("traffic: {} sessions, {} packets offered, {} lost on flow lines during transitions\n",
                       r.sessions_offered, r.packets_offered, r.line_packets_dropped);
    out += fmt::format("records dropped: {} in transition, {} on full storage; {} NIC noise records\n",
                       r.records_dropped_transition, r.records_dropped_storage, r.nic_noise_records);
    out += fmt::format("control: {} signals ({} power-save), {} role transitions, {} ms total drop window\n",
                       r.control_signals, r.power_save_signals, r.transitions, r.transition_drop_ms);
    out += fmt::format("storage: {} relocations ({} bytes), {} uploads ({} bytes)\n", r.relocations, r.bytes_relocated,
                       r.uploads, r.bytes_uploaded);
    out += fmt::format("alerts: {} raw ({} true), {} confirmed ({} true)\n", r.alerts_raw, r.alerts_raw_true,
                       r.alerts_confirmed, r.alerts_confirmed_true);
    out += fmt::format("precision raw {} | confirmed {} | recall {} ({} of {} events)\n", pct(r.precision_raw),
                       pct(r.precision_confirmed), pct(r.recall), r.events_detected, r.events_injected);
    out += fmt::format("energy: fleet {:.3f} Wh | legacy {:.3f} kWh | managed {:.3f} kWh | saving {:.2f}%\n",
                       r.fleet_wh, r.legacy_kwh, r.iot_kwh, r.saving_percent);
    out += fmt::format("CO2 avoided: {:.1f} mg ({:.1f} mg/h) [1]\n", r.co2_saved_mg, r.co2_saved_mg_per_hour);
    out += fmt::format("advice items: {}\n", r.advice_items);
    if (!r.log_sha256.empty()) out += fmt::format("log sha256: {}\n", r.log_sha256);
    out += fmt::format(
        "\n[1] CO2 uses {:.1f} mg per kWh saved (563.4 mg per hour over a 0.9 kWh hourly saving). A separately\n"
        "    quoted figure of more than 4000 mg per day does not agree with 563.4 mg/h x 24 h = 13521.6 mg/day;\n"
        "    only the hourly figure is reproduced here.\n",
        r.energy_profile.co2_mg_per_kwh);
    return out;
}

std::string render_svg(const Report& r) {
    constexpr double kW = 960, kH = 320, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
    const double plot_w = kW - kLeft - kRight;
    const double plot_h = kH - kTop - kBottom;
    const double span = r.duration_ms > 0 ? static_cast<double>(r.duration_ms) : 1.0;
    std::int64_t max_uw = 1;
    for (const auto& [t, uw] : r.power_timeline_uw) max_uw = std::max(max_uw, uw);
    auto x = [&](TimeMs t) { return kLeft + plot_w * static_cast<double>(t) / span; };
    auto y = [&](std::int64_t uw) { return kTop + plot_h * (1.0 - static_cast<double>(uw) / static_cast<double>(max_uw)); };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">Fleet power (W) and confirmed alerts, seed {3}</text>\n",
        kW, kH, kLeft, r.seed);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop, kTop + plot_h);
    out += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kLeft + plot_w,
                       kTop + plot_h);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.2f}</text>\n",
                       kLeft - 6, kTop + 4, static_cast<double>(max_uw) / 1e6);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">0</text>\n",
                       kLeft - 6, kTop + plot_h + 4);
    const int ticks = 6;
    for (int i = 0; i <= ticks; ++i) {
        TimeMs t = static_cast<TimeMs>(span * i / ticks);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.1f} h</text>\n",
                           x(t), kTop + plot_h + 18, static_cast<double>(t) / 3.6e6);
    }

    if (!r.power_timeline_uw.empty()) {
        std::string points;
        std::int64_t prev = r.power_timeline_uw.front().second;
        for (const auto& [t, uw] : r.power_timeline_uw) {
            points += fmt::format("{:.1f},{:.1f} {:.1f},{:.1f} ", x(t), y(prev), x(t), y(uw));
            prev = uw;
        }
        points += fmt::format("{:.1f},{:.1f}", x(r.duration_ms), y(prev));
        out += fmt::format("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>\n", points);
    }
    for (TimeMs t : r.confirmed_times) {
        out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"#d62728\"/>\n", x(t), kTop + plot_h + 34);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">confirmed alerts</text>\n",
                       kLeft + plot_w - 100, kTop + plot_h + 52);
    out += "</svg>\n";
    return out;
}

namespace {

SensorRole role_field(const json& body, const char* key) { return parse_role(body.at(key).get<std::string>()); }

}  // namespace

Report build_report_from_log(std::span<const std::string> lines) {
    Report r;
    if (lines.empty()) {
        finalize(r);
        return r;
    }
    std::vector<TruthEvent> truth;
    std::set<std::size_t> detected;
    TimeMs slack = 0;
    std::int64_t fleet_uw = 0;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        try {
            std::string framed = lines[i] + "\n";
            auto tag = peek_type(framed);
            if (tag == "TEL") {
                auto msg = std::get<TelemetryMessage>(parse(framed));
                for (const auto& a : msg.alerts) {
                    ++r.alerts_raw;
                    if (std::any_of(truth.begin(), truth.end(),
                                    [&](const TruthEvent& ev) { return matches_event(a.key, a.time_ms, ev, slack); })) {
                        ++r.alerts_raw_true;
                    }
                }
                continue;
            }
            if (tag == "CTL") {
                auto signal = std::get<ControlSignal>(parse(framed));
                ++r.control_signals;
                if (std::holds_alternative<action::PowerSave>(signal.action)) ++r.power_save_signals;
                continue;
            }
            if (tag == "HQ") {
                parse(framed);
                continue;
            }
            if (tag != "SIM") throw ValidationError("unknown record tag '" + tag + "'");

            auto env = json::parse(lines[i]);
            if (env.at("v").get<int>() != kProtocolVersion) throw ValidationError("unsupported log version");
            const auto& b = env.at("body");
            const auto kind = b.at("kind").get<std::string>();
            if (kind == "start") {
                r.seed = b.at("seed").get<std::uint64_t>();
                r.duration_ms = b.at("duration").get<TimeMs>();
                r.role_management = b.at("role_management").get<std::string>();
                slack = b.at("slack").get<TimeMs>();
                const auto& e = b.at("energy");
                r.energy_profile = PowerProfile{e.at("collection_w").get<double>(),     e.at("half_w").get<double>(),
                                                e.at("full_w").get<double>(),           e.at("legacy_sensor_w").get<double>(),
                                                e.at("infrastructure_w").get<double>(), e.at("co2_mg_per_kwh").get<double>()};
                r.sensors = b.at("sensors").size();
                for (const auto& s : b.at("sensors")) fleet_uw += power_draw_uw(role_field(s, "role"), r.energy_profile);
                r.power_timeline_uw.push_back({0, fleet_uw});
            } else if (kind == "inject") {
                truth.push_back({b.at("id").get<std::string>(), b.at("at").get<TimeMs>(), b.at("duration").get<TimeMs>(),
                                 parse_alert_kind(b.at("event_kind").get<std::string>()), codec::decode_flow_key(b.at("flow"))});
                ++r.events_injected;
            } else if (kind == "capture") {
                r.sessions_offered += b.at("sessions").get<std::uint64_t>();
                r.packets_offered += b.at("packets").get<std::uint64_t>();
                r.line_packets_dropped += b.at("line_dropped").get<std::uint64_t>();
                r.records_dropped_transition += b.at("dropped_transition").get<std::uint64_t>();
                r.records_dropped_storage += b.at("dropped_storage").get<std::uint64_t>();
                r.bytes_stored += b.at("stored_bytes").get<std::uint64_t>();
                r.nic_noise_records += b.at("noise").get<std::uint64_t>();
            } else if (kind == "transition") {
                auto from = role_field(b, "from");
                auto to = role_field(b, "to");
                ++r.transitions;
                r.transition_drop_ms += b.at("drop_end").get<TimeMs>() - b.at("drop_start").get<TimeMs>();
                fleet_uw += power_draw_uw(to, r.energy_profile) - power_draw_uw(from, r.energy_profile);
                r.power_timeline_uw.push_back({b.at("at").get<TimeMs>(), fleet_uw});
            } else if (kind == "energy") {
                auto from = b.at("from").get<TimeMs>();
                auto to = b.at("to").get<TimeMs>();
                if (to < from) throw ValidationError("energy interval ends before it starts");
                auto uwms = power_draw_uw(role_field(b, "role"), r.energy_profile) * (to - from);
                r.node_uwms[SensorId(b.at("node").get<std::string>())] += uwms;
                r.fleet_uwms += uwms;
            } else if (kind == "confirmed") {
                auto key = codec::decode_flow_key(b.at("flow"));
                auto first = b.at("first").get<TimeMs>();
                auto last = b.at("last").get<TimeMs>();
                ++r.alerts_confirmed;
                r.confirmed_times.push_back(last);
                bool hit = false;
                for (std::size_t k = 0; k < truth.size(); ++k) {
                    if (confirmed_matches_event(key, first, last, truth[k], slack)) {
                        hit = true;
                        detected.insert(k);
                    }
                }
                if (hit) ++r.alerts_confirmed_true;
            } else if (kind == "relocation") {
                ++r.relocations;
                r.bytes_relocated += b.at("bytes").get<std::uint64_t>();
            } else if (kind == "upload") {
                ++r.uploads;
                r.bytes_uploaded += b.at("bytes").get<std::uint64_t>();
            } else if (kind == "advice") {
                ++r.advice_items;
            } else if (kind != "end") {
                throw ValidationError("unknown simulator record '" + kind + "'");
            }
        } catch (const LogError&) {
            throw;
        } catch (const std::exception& e) {
            throw LogError(line_no, e.what());
        }
    }
    r.events_detected = detected.size();
    finalize(r);
    r.log_sha256 = log_sha256(lines);
    return r;
}

std::vector<std::string> read_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read log " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<std::string> lines;
    std::size_t begin = 0;
    while (begin < text.size()) {
        auto end = text.find('\n', begin);
        if (end == std::string::npos) throw LogError(lines.size() + 1, "truncated line (no newline terminator)");
        lines.push_back(text.substr(begin, end - begin));
        begin = end + 1;
    }
    return lines;
}

std::string log_sha256(std::span<const std::string> lines) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    for (const auto& line : lines) {
        EVP_DigestUpdate(ctx, line.data(), line.size());
        EVP_DigestUpdate(ctx, "\n", 1);
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace gnsm
