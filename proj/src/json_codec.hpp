#pragma once

// JSON encoders/decoders shared by the wire protocol, the event log and the
// scenario/report files. Decoders throw nlohmann::json::exception or
// ValidationError on schema mismatch; callers map those to their own errors.

#include "gnsm/core_types.hpp"
#include "gnsm/messaging.hpp"

#include <json.hpp>

namespace gnsm::codec {

using nlohmann::json;

json encode(const FlowKey& key);
FlowKey decode_flow_key(const json& j);

json encode(const Alert& alert);
Alert decode_alert(const json& j);

json encode(const ControlAction& action);
ControlAction decode_control_action(const json& j);

json encode(const ControlSignal& signal);
ControlSignal decode_control_signal(const json& j);

json encode(const TelemetryMessage& msg);
TelemetryMessage decode_telemetry(const json& j);

json encode(const HqCommand& cmd);
HqCommand decode_hq_command(const json& j);

json encode(const HqResponse& response);
HqResponse decode_hq_response(const json& j);

/// Wraps a body into the versioned envelope and dumps it with its newline.
std::string envelope_line(std::string_view type_tag, json body);

}  // namespace gnsm::codec
