#pragma once

/// @file cli.hpp
/// @brief Operator entry points behind the green_nsm executable.
///
///   run    --scenario PATH [--seed N] --out DIR
///   report --log PATH --out DIR
///   replay --log PATH
///   hq     --addr HOST:PORT <query_state | set-role ID ROLE | escalate ID |
///           power-save ID | relocate ID TO | schedule-upload ID START_MS END_MS>
///   hub    --scenario PATH --addr HOST:PORT [--log PATH] [--max-connections N]
///
/// Exit codes: 0 success, 1 missing or unreadable file, 2 invalid scenario,
/// log or arguments, 3 hub unreachable, 4 hub rejected the command.
/// GREEN_NSM_LOG_LEVEL selects error, info (default) or debug logging.

#include "gnsm/hub.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnsm::cli {

enum ExitCode : int { ok = 0, missing_file = 1, invalid_input = 2, unreachable = 3, hub_error = 4 };

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Address {
    std::string host;
    std::uint16_t port = 0;
};

/// Parses HOST:PORT. Throws ValidationError.
Address parse_address(const std::string& text);

class ConnectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Connects, sends one HQ command and waits for the response line.
/// Throws ConnectError when the hub cannot be reached.
HqResponse send_hq(const Address& address, const HqCommand& command);

/// Bound listening socket; port 0 picks a free port.
class Listener {
public:
    explicit Listener(const Address& address);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    int fd() const noexcept { return fd_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Serves NDJSON connections one at a time on the hub's single event loop:
/// TEL lines are ingested, HQ commands answered. Stops after
/// `max_connections` connections when set.
void serve(Hub& hub, Listener& listener, std::optional<std::size_t> max_connections);

}  // namespace gnsm::cli
