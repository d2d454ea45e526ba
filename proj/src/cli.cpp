#include "gnsm/cli.hpp"

#include "gnsm/report.hpp"
#include "gnsm/scenario.hpp"
#include "gnsm/simulator.hpp"

#include <CLI11.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <ostream>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace gnsm::cli {

namespace fs = std::filesystem;

namespace {

void configure_logging() {
    static std::shared_ptr<spdlog::logger> logger = [] {
        auto l = spdlog::stderr_logger_mt("green_nsm");
        l->set_pattern("[%l] %v");
        spdlog::set_default_logger(l);
        return l;
    }();
    const char* env = std::getenv("GREEN_NSM_LOG_LEVEL");
    std::string level = env ? env : "info";
    if (level == "error") {
        logger->set_level(spdlog::level::err);
    } else if (level == "debug") {
        logger->set_level(spdlog::level::debug);
    } else {
        logger->set_level(spdlog::level::info);
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string text;
    for (const auto& l : lines) {
        text += l;
        text += '\n';
    }
    return text;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            std::ostream& out, std::ostream& err) {
    if (!fs::is_regular_file(scenario_path)) {
        err << "error: scenario file not found: " << scenario_path << "\n";
        return missing_file;
    }
    Scenario scenario;
    try {
        scenario = load_scenario(scenario_path);
    } catch (const ValidationError& e) {
        err << "error: invalid scenario " << scenario_path << ": " << e.what() << "\n";
        return invalid_input;
    } catch (const std::exception& e) {
        err << "error: cannot read scenario " << scenario_path << ": " << e.what() << "\n";
        return missing_file;
    }
    if (seed) scenario.seed = *seed;
    spdlog::info("running {} ({} sensors, {} ms, seed {})", scenario_path, scenario.sensors.size(), scenario.duration_ms,
                 scenario.seed);
    SimResult result;
    try {
        result = run(scenario);
    } catch (const ValidationError& e) {
        err << "error: invalid scenario " << scenario_path << ": " << e.what() << "\n";
        return invalid_input;
    }
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "events.ndjson", join_lines(result.log));
    write_file(fs::path(out_dir) / "report.json", report_to_json(result.report));
    write_file(fs::path(out_dir) / "summary.txt", format_summary(result.report));
    spdlog::debug("log sha256 {}", result.report.log_sha256);
    out << format_summary(result.report);
    return ok;
}

std::optional<Report> report_from(const std::string& log_path, std::ostream& err, int& code) {
    if (!fs::is_regular_file(log_path)) {
        err << "error: log file not found: " << log_path << "\n";
        code = missing_file;
        return std::nullopt;
    }
    try {
        return build_report_from_log(read_log(log_path));
    } catch (const LogError& e) {
        err << "error: " << log_path << ": " << e.what() << "\n";
        code = invalid_input;
    } catch (const std::exception& e) {
        err << "error: cannot read " << log_path << ": " << e.what() << "\n";
        code = missing_file;
    }
    return std::nullopt;
}

int cmd_report(const std::string& log_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    int code = ok;
    auto report = report_from(log_path, err, code);
    if (!report) return code;
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "report.json", report_to_json(*report));
    write_file(fs::path(out_dir) / "summary.txt", format_summary(*report));
    write_file(fs::path(out_dir) / "timeline.svg", render_svg(*report));
    out << format_summary(*report);
    return ok;
}

int cmd_replay(const std::string& log_path, std::ostream& out, std::ostream& err) {
    int code = ok;
    auto report = report_from(log_path, err, code);
    if (!report) return code;
    out << report_to_json(*report);
    return ok;
}

HqCommand parse_hq_words(const std::vector<std::string>& words) {
    if (words.empty()) throw ValidationError("missing hq command");
    std::string verb = words[0];
    std::replace(verb.begin(), verb.end(), '_', '-');
    auto need = [&](std::size_t n) {
        if (words.size() != n) throw ValidationError(fmt::format("'{}' takes {} argument(s)", words[0], n - 1));
    };
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw ValidationError("not a number: " + s);
        return static_cast<TimeMs>(v);
    };
    HqCommand cmd;
    if (verb == "query-state") {
        need(1);
        cmd.action = action::QueryState{};
        return cmd;
    }
    if (words.size() < 2) throw ValidationError("'" + words[0] + "' needs a sensor id");
    cmd.target = SensorId(words[1]);
    if (verb == "set-role") {
        need(3);
        cmd.action = action::SetRole{parse_role(words[2])};
    } else if (verb == "escalate") {
        need(2);
        cmd.action = action::Escalate{};
    } else if (verb == "power-save") {
        need(2);
        cmd.action = action::PowerSave{};
    } else if (verb == "relocate") {
        need(3);
        cmd.action = action::RelocateStorage{SensorId(words[2])};
    } else if (verb == "schedule-upload") {
        need(4);
        cmd.action = action::ScheduleUpload{number(words[2]), number(words[3])};
    } else {
        throw ValidationError("unknown hq command '" + words[0] + "'");
    }
    return cmd;
}

void print_response(const HqResponse& r, std::ostream& out) {
    if (!r.queued.empty()) {
        for (const auto& s : r.queued) out << "ok: queued " << describe(s.action) << " for " << s.target.str() << "\n";
        return;
    }
    out << "system: " << r.system_string << "\n";
    out << fmt::format("{:<10} {:<11} {:>6} {:>6} {:<17} {:<8} {:>8}\n", "id", "role", "weight", "prob", "state", "mode",
                       "storage");
    for (const auto& n : r.nodes) {
        out << fmt::format("{:<10} {:<11} {:>6.2f} {:>6.2f} {:<17} {:<8} {:>8.3f}\n", n.id.str(), to_string(n.role),
                           n.weight, n.prob, to_string(n.state), to_string(n.mode), n.storage_fraction);
    }
}

int cmd_hq(const std::string& addr, const std::vector<std::string>& words, std::ostream& out, std::ostream& err) {
    Address address;
    HqCommand cmd;
    try {
        address = parse_address(addr);
        cmd = parse_hq_words(words);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    }
    HqResponse response;
    try {
        response = send_hq(address, cmd);
    } catch (const ConnectError& e) {
        err << "error: " << e.what() << "\n";
        return unreachable;
    }
    if (!response.ok) {
        err << "error from hub: " << response.error << "\n";
        return hub_error;
    }
    print_response(response, out);
    return ok;
}

int cmd_hub(const std::string& scenario_path, const std::string& addr, const std::string& log_path,
            std::optional<std::size_t> max_connections, std::ostream& out, std::ostream& err) {
    if (!fs::is_regular_file(scenario_path)) {
        err << "error: scenario file not found: " << scenario_path << "\n";
        return missing_file;
    }
    Scenario scenario;
    Address address;
    try {
        scenario = load_scenario(scenario_path);
        address = parse_address(addr);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    }
    HubConfig config;
    config.quiet_period_ms = scenario.hub.quiet_period_ms;
    config.power_save_floor = scenario.hub.power_save_floor;
    config.nssm = NssmParams{scenario.hub.alpha, scenario.hub.storage_ceiling};
    config.pooling = scenario.pooling;
    config.weight_decay = scenario.hub.weight_decay;
    std::vector<SensorId> fleet;
    for (const auto& s : scenario.sensors) fleet.push_back(s.id);
    Hub hub(config, fleet, build_topology(scenario));

    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path, std::ios::binary | std::ios::app);
        if (!log) {
            err << "error: cannot open log " << log_path << "\n";
            return missing_file;
        }
        hub.set_sink([&log](const std::string& line) {
            log << line;
            log.flush();
        });
    }
    try {
        Listener listener(address);
        out << "listening on " << address.host << ":" << listener.port() << std::endl;
        serve(hub, listener, max_connections);
    } catch (const ConnectError& e) {
        err << "error: " << e.what() << "\n";
        return unreachable;
    }
    return ok;
}

}  // namespace

Address parse_address(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw ValidationError("address must be HOST:PORT, got '" + text + "'");
    }
    Address a;
    a.host = text.substr(0, colon);
    const std::string port = text.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); }) || port.size() > 5 ||
        std::stoul(port) > 65535) {
        throw ValidationError("bad port '" + port + "'");
    }
    a.port = static_cast<std::uint16_t>(std::stoul(port));
    return a;
}

namespace {

sockaddr_in resolve(const Address& address) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(address.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw ConnectError("cannot resolve host " + address.host);
    }
    sockaddr_in sa{};
    std::memcpy(&sa, res->ai_addr, sizeof(sa));
    freeaddrinfo(res);
    sa.sin_port = htons(address.port);
    return sa;
}

void send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ConnectError(std::string("send failed: ") + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

struct Fd {
    int fd;
    ~Fd() {
        if (fd >= 0) ::close(fd);
    }
};

}  // namespace

HqResponse send_hq(const Address& address, const HqCommand& command) {
    auto sa = resolve(address);
    Fd sock{::socket(AF_INET, SOCK_STREAM, 0)};
    if (sock.fd < 0) throw ConnectError(std::string("socket: ") + std::strerror(errno));
    if (::connect(sock.fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        throw ConnectError(fmt::format("cannot connect to {}:{}: {}", address.host, address.port, std::strerror(errno)));
    }
    send_all(sock.fd, frame(command));
    LineDecoder decoder;
    char buf[4096];
    for (;;) {
        if (auto line = decoder.next_line()) {
            auto msg = parse(*line);
            if (auto* r = std::get_if<HqResponse>(&msg)) return *r;
            continue;
        }
        auto n = ::recv(sock.fd, buf, sizeof(buf), 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw ConnectError("hub closed the connection without a response");
        decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    }
}

Listener::Listener(const Address& address) {
    auto sa = resolve(address);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw ConnectError(std::string("socket: ") + std::strerror(errno));
    int yes = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0 || ::listen(fd_, 16) != 0) {
        auto why = std::string(std::strerror(errno));
        ::close(fd_);
        throw ConnectError(fmt::format("cannot listen on {}:{}: {}", address.host, address.port, why));
    }
    socklen_t len = sizeof(sa);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len);
    port_ = ntohs(sa.sin_port);
}

Listener::~Listener() {
    if (fd_ >= 0) ::close(fd_);
}

void serve(Hub& hub, Listener& listener, std::optional<std::size_t> max_connections) {
    const auto started = std::chrono::steady_clock::now();
    auto now_ms = [&] {
        return static_cast<TimeMs>(
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count());
    };
    for (std::size_t served = 0; !max_connections || served < *max_connections; ++served) {
        Fd conn{::accept(listener.fd(), nullptr, nullptr)};
        if (conn.fd < 0) {
            if (errno == EINTR) continue;
            throw ConnectError(std::string("accept: ") + std::strerror(errno));
        }
        spdlog::debug("hub: connection {}", served + 1);
        LineDecoder decoder;
        char buf[4096];
        try {
            for (;;) {
                auto line = decoder.next_line();
                if (!line) {
                    auto n = ::recv(conn.fd, buf, sizeof(buf), 0);
                    if (n < 0 && errno == EINTR) continue;
                    if (n <= 0) break;
                    decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
                    continue;
                }
                hub.advance_clock(now_ms());
                Message msg;
                try {
                    msg = parse(*line);
                } catch (const ProtocolError& e) {
                    spdlog::error("hub: dropped frame: {}", e.what());
                    continue;
                }
                if (auto* cmd = std::get_if<HqCommand>(&msg)) {
                    cmd->issued_at = std::max(cmd->issued_at, hub.state().now_ms);
                    send_all(conn.fd, frame(hub.handle_hq(*cmd)));
                } else if (auto* tel = std::get_if<TelemetryMessage>(&msg)) {
                    hub.ingest_telemetry(*tel);
                }
                for (const auto& s : hub.dispatch(now_ms())) send_all(conn.fd, frame(s));
            }
        } catch (const ConnectError& e) {
            spdlog::info("hub: connection ended: {}", e.what());
        }
    }
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    configure_logging();
    CLI::App app{"green_nsm: IoT network security monitoring orchestration and simulation"};
    app.require_subcommand(1, 1);

    std::string scenario_path, out_dir, log_path, addr, hub_log;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_connections;
    std::vector<std::string> words;

    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write events.ndjson, report.json, summary.txt");
    run_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* report_cmd = app.add_subcommand("report", "Rebuild the report, summary and SVG timeline from a log");
    report_cmd->add_option("--log", log_path, "Event log (NDJSON)")->required();
    report_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* replay_cmd = app.add_subcommand("replay", "Recompute the report from a log and print it");
    replay_cmd->add_option("--log", log_path, "Event log (NDJSON)")->required();

    auto* hq_cmd = app.add_subcommand("hq", "Send one operator command to a running hub");
    hq_cmd->add_option("--addr", addr, "Hub address HOST:PORT")->required();
    hq_cmd->add_option("command", words, "query_state | set-role ID ROLE | escalate ID | power-save ID | relocate ID TO | "
                                         "schedule-upload ID START_MS END_MS")
        ->required()
        ->expected(1, 4);

    auto* hub_cmd = app.add_subcommand("hub", "Serve a live hub for the scenario's fleet over TCP");
    hub_cmd->add_option("--scenario", scenario_path, "Scenario JSON file (fleet, topology, hub settings)")->required();
    hub_cmd->add_option("--addr", addr, "Listen address HOST:PORT (port 0 picks one)")->required();
    hub_cmd->add_option("--log", hub_log, "Append every ingested and emitted message to this NDJSON file");
    hub_cmd->add_option("--max-connections", max_connections, "Exit after this many connections");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    }

    try {
        if (*run_cmd) return cmd_run(scenario_path, seed, out_dir, out, err);
        if (*report_cmd) return cmd_report(log_path, out_dir, out, err);
        if (*replay_cmd) return cmd_replay(log_path, out, err);
        if (*hq_cmd) return cmd_hq(addr, words, out, err);
        if (*hub_cmd) return cmd_hub(scenario_path, addr, hub_log, max_connections, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return missing_file;
    }
    return invalid_input;
}

}  // namespace gnsm::cli
