// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "warden/ast.hpp"
#include "warden/policy_json.hpp"
#include "warden/value.hpp"

namespace warden {

/// Where a state change came from. Physical = the environment or a user at
/// the device; cyber = a command the mediator relayed; corrective = a
/// command the mediator itself issued to repair a violation.
enum class EventOrigin { Physical, Cyber, Corrective };

inline const char* origin_name(EventOrigin o) {
  switch (o) {
    case EventOrigin::Physical: return "physical";
    case EventOrigin::Cyber: return "cyber";
    default: return "corrective";
  }
}

inline std::optional<EventOrigin> origin_from_name(const std::string& s) {
  if (s == "physical") return EventOrigin::Physical;
  if (s == "cyber") return EventOrigin::Cyber;
  if (s == "corrective") return EventOrigin::Corrective;
  return std::nullopt;
}

enum class CommandSource { Native, ThirdParty, Unknown, Corrective };

inline const char* source_name(CommandSource s) {
  switch (s) {
    case CommandSource::Native: return "native";
    case CommandSource::ThirdParty: return "third_party";
    case CommandSource::Corrective: return "corrective";
    default: return "unknown";
  }
}

/// A downstream command on its way to a device.
struct CommandMessage {
  std::string device;
  std::string command;
  std::optional<Value> value;  // wire payload; state effects come from the registry
  CommandSource source = CommandSource::Unknown;
  std::uint64_t correlation = 0;  // broker-assigned, echoed in the log
};

/// One device state change.
struct EventToken {
  std::string device;
  std::string capability;
  Value value;
  EventOrigin origin = EventOrigin::Physical;
};

enum class Trigger { Command, StateUpdate, TimerTick };

inline const char* trigger_name(Trigger t) {
  switch (t) {
    case Trigger::Command: return "command";
    case Trigger::StateUpdate: return "state";
    default: return "timer";
  }
}

/// One checker decision (or broker-level disposition), as written to the
/// enforcement log. The three enforcement outcomes are Forward, Dropped and
/// Corrected; the remaining kinds record traffic the checker never saw
/// (rejected commands, quarantined events, unregulated topics) and alerts.
struct EnforcementDecision {
  enum class Kind {
    Forward,
    Dropped,      // command discarded before reaching the device
    Corrected,    // state position violated; corrections executed in order
    Rejected,     // unknown device/command: protocol error to the sender
    Quarantined,  // out-of-domain value: logged, trace not advanced
    Unregulated,  // topic outside the registry: relayed untouched
    Unrecovered,  // cascade budget exhausted while still unsafe
    Shutdown,     // final record flushed on graceful stop
  };

  Kind kind = Kind::Forward;
  Trigger trigger = Trigger::StateUpdate;
  std::uint64_t position = 0;      // trace position (post-step for state/timer)
  int rule_index = -1;             // violated rule, for Dropped/Corrected
  std::string rule_name;
  std::vector<CorrectiveAction> actions;  // corrections actually executed
  bool warn = false;               // violating command had no matching drop

  // the triggering message, when there is one
  std::string device;
  std::string capability;  // state updates
  std::string command;     // commands
  std::optional<Value> value;
  std::optional<EventOrigin> origin;
  std::uint64_t correlation = 0;

  std::string note;        // free-form detail for rejected/quarantined/alerts
  std::int64_t ts_ms = 0;  // wall-clock milliseconds; 0 in pure engine tests

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Forward: return "forward";
      case Kind::Dropped: return "dropped";
      case Kind::Corrected: return "corrected";
      case Kind::Rejected: return "rejected";
      case Kind::Quarantined: return "quarantined";
      case Kind::Unregulated: return "unregulated";
      case Kind::Unrecovered: return "unrecovered";
      default: return "shutdown";
    }
  }
};

inline Json decision_to_json(const EnforcementDecision& d) {
  Json j;
  j["kind"] = EnforcementDecision::kind_name(d.kind);
  j["trigger"] = trigger_name(d.trigger);
  j["pos"] = d.position;
  if (d.rule_index >= 0) {
    j["rule_index"] = d.rule_index;
    if (!d.rule_name.empty()) j["rule"] = d.rule_name;
  }
  if (!d.actions.empty()) {
    Json acts = Json::array();
    for (const auto& a : d.actions) acts.push_back(render_action(a));
    j["actions"] = std::move(acts);
  }
  if (d.warn) j["warn"] = true;
  if (!d.device.empty()) j["device"] = d.device;
  if (!d.capability.empty()) j["capability"] = d.capability;
  if (!d.command.empty()) j["command"] = d.command;
  if (d.value) j["value"] = value_to_json(*d.value);
  if (d.origin) j["origin"] = origin_name(*d.origin);
  if (d.correlation) j["correlation"] = d.correlation;
  if (!d.note.empty()) j["note"] = d.note;
  j["ts_ms"] = d.ts_ms;
  return j;
}

}  // namespace warden
