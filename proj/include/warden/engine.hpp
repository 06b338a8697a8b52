// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "warden/ast.hpp"
#include "warden/messages.hpp"
#include "warden/monitor.hpp"
#include "warden/registry.hpp"
#include "warden/shadow.hpp"
#include "warden/snapshot.hpp"

namespace warden {

struct EngineConfig {
  /// Consecutive violating positions tolerated before the engine stops
  /// issuing corrections and raises an Unrecovered alert. A clean position
  /// re-arms it.
  int cascade_budget = 10;
};

/// What the caller (broker, replayer, simulator) must do after a trigger.
struct EngineResult {
  std::vector<EnforcementDecision> records;  // enforcement-log lines, in order
  std::vector<CommandMessage> sends;         // corrective commands to publish
  bool relay = false;                        // relay the triggering message onward

  const EnforcementDecision& decision() const { return records.front(); }
};

/// The policy checker proper: owns the rule monitors and the shadow state,
/// and turns each trigger into decisions, corrective sends, and a relay
/// verdict. Pure with respect to I/O — no sockets, no clocks beyond an
/// injectable timestamp source — so it can be driven directly by tests and
/// by the offline simulator.
///
/// Trigger semantics:
///   - command: checked against the hypothetical next state; never consumes
///     a trace position. Violating commands are dropped (stateless).
///   - state update: consumes one position; violated rules execute their
///     corrections in rule order; the event is still relayed upstream.
///   - timer tick: consumes one position on the current snapshot; handled
///     like a state update without a triggering message.
class Engine {
 public:
  Engine(Policy policy, DeviceRegistry registry, StateSnapshot init = {},
         EngineConfig cfg = {},
         std::function<std::int64_t()> clock = default_clock)
      : policy_(std::move(policy)),
        registry_(std::move(registry)),
        shadow_(registry_, init),
        cfg_(cfg),
        clock_(std::move(clock)) {
    validate_policy(policy_, registry_);
    monitors_.reserve(policy_.rules.size());
    for (const auto& r : policy_.rules) monitors_.emplace_back(r.invariant);
  }

  // ---- trigger (1): a downstream command is about to reach a device ------

  EngineResult on_command(const CommandMessage& message) {
    CommandMessage cmd = message;
    if (cmd.correlation == 0) cmd.correlation = next_correlation_++;

    EngineResult res;
    const CommandSpec* spec = registry_.find_command(cmd.device, cmd.command);
    if (!spec) {
      EnforcementDecision d = base(EnforcementDecision::Kind::Rejected, Trigger::Command);
      d.device = cmd.device;
      d.command = cmd.command;
      d.value = cmd.value;
      d.correlation = cmd.correlation;
      d.note = registry_.find_device(cmd.device)
                   ? "unknown command for device"
                   : "unknown device";
      res.records.push_back(std::move(d));
      return res;
    }

    const StateSnapshot hyp =
        shadow_.apply_command_hypothetically(registry_, cmd.device, cmd.command);
    int violated = -1;
    for (std::size_t j = 0; j < monitors_.size(); ++j) {
      if (!monitors_[j].peek(hyp)) {
        violated = static_cast<int>(j);
        break;
      }
    }

    if (violated < 0) {
      EnforcementDecision d = base(EnforcementDecision::Kind::Forward, Trigger::Command);
      fill_command(d, cmd);
      res.records.push_back(std::move(d));
      res.relay = true;
      pending_.push_back(Pending{state_key(cmd.device, spec->capability), spec->value,
                                 cmd.source == CommandSource::Corrective});
      trim_pending();
      return res;
    }

    // Dropped either way: with the rule's matching drop action, or as the
    // fail-safe (discard and warn) when the rule declares none.
    EnforcementDecision d = base(EnforcementDecision::Kind::Dropped, Trigger::Command);
    fill_command(d, cmd);
    d.rule_index = violated;
    d.rule_name = policy_.rules[static_cast<std::size_t>(violated)].name;
    const DropAction* match = matching_drop(violated, cmd);
    if (match) {
      d.actions.push_back(*match);
    } else {
      d.warn = true;
      d.note = "no matching drop action; command discarded fail-safe";
    }
    res.records.push_back(std::move(d));
    return res;
  }

  // ---- trigger (2): a device changed its state ----------------------------

  EngineResult on_state_update(const std::string& device, const std::string& capability,
                               const Value& value) {
    EngineResult res;
    const CapabilitySpec* cap = registry_.find_capability(device, capability);
    if (!cap) {
      EnforcementDecision d =
          base(EnforcementDecision::Kind::Unregulated, Trigger::StateUpdate);
      d.device = device;
      d.capability = capability;
      d.value = value;
      d.note = "not in registry; relayed untouched";
      res.records.push_back(std::move(d));
      res.relay = true;
      return res;
    }
    if (!cap->contains(value)) {
      EnforcementDecision d =
          base(EnforcementDecision::Kind::Quarantined, Trigger::StateUpdate);
      d.device = device;
      d.capability = capability;
      d.value = value;
      d.note = "value outside declared domain";
      res.records.push_back(std::move(d));
      return res;
    }

    const EventOrigin origin = infer_origin(state_key(device, capability), value);
    shadow_.apply_update(device, capability, value);

    step_and_correct(res, Trigger::StateUpdate, [&](EnforcementDecision& d) {
      d.device = device;
      d.capability = capability;
      d.value = value;
      d.origin = origin;
    });
    res.relay = true;  // services must see reality, violating or not
    return res;
  }

  // ---- trigger (3): the policy-checker timer expired -----------------------

  EngineResult on_timer_tick() {
    EngineResult res;
    step_and_correct(res, Trigger::TimerTick, [](EnforcementDecision&) {});
    return res;
  }

  // ---- introspection -------------------------------------------------------

  const StateSnapshot& snapshot() const { return shadow_.snapshot(); }
  const Policy& policy() const { return policy_; }
  const DeviceRegistry& registry() const { return registry_; }
  std::uint64_t position() const { return position_; }
  bool unrecovered() const { return unrecovered_; }

  static std::int64_t default_clock() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

 private:
  struct Pending {
    std::string key;
    Value value;
    bool corrective;
  };

  EnforcementDecision base(EnforcementDecision::Kind kind, Trigger trig) const {
    EnforcementDecision d;
    d.kind = kind;
    d.trigger = trig;
    d.position = position_;
    d.ts_ms = clock_();
    return d;
  }

  static void fill_command(EnforcementDecision& d, const CommandMessage& cmd) {
    d.device = cmd.device;
    d.command = cmd.command;
    d.value = cmd.value;
    d.correlation = cmd.correlation;
  }

  const DropAction* matching_drop(int rule, const CommandMessage& cmd) const {
    for (const auto& a : policy_.rules[static_cast<std::size_t>(rule)].corrections)
      if (const auto* drop = std::get_if<DropAction>(&a))
        if (drop->matches(cmd.device, cmd.command)) return drop;
    return nullptr;
  }

  /// Confirming updates of commands we relayed (or issued) are tagged with
  /// their command's origin; anything else is a physical change.
  EventOrigin infer_origin(const std::string& key, const Value& value) {
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (it->key == key && value_equal(it->value, value)) {
        const bool corrective = it->corrective;
        pending_.erase(it);
        return corrective ? EventOrigin::Corrective : EventOrigin::Cyber;
      }
    }
    return EventOrigin::Physical;
  }

  void trim_pending() {
    while (pending_.size() > 256) pending_.pop_front();
  }

  /// Shared core of triggers (2) and (3): commit one trace position on the
  /// current snapshot, then run corrections for every violated rule in rule
  /// order, within the cascade budget.
  template <typename FillFn>
  void step_and_correct(EngineResult& res, Trigger trig, FillFn&& fill) {
    ++position_;
    std::vector<int> violated;
    for (std::size_t j = 0; j < monitors_.size(); ++j)
      if (!monitors_[j].step(shadow_.snapshot())) violated.push_back(static_cast<int>(j));

    if (violated.empty()) {
      rounds_ = 0;
      unrecovered_ = false;
      EnforcementDecision d = base(EnforcementDecision::Kind::Forward, trig);
      d.position = position_;
      fill(d);
      res.records.push_back(std::move(d));
      return;
    }

    ++rounds_;
    const bool suppress = rounds_ > cfg_.cascade_budget;

    for (int j : violated) {
      const PolicyRule& rule = policy_.rules[static_cast<std::size_t>(j)];
      EnforcementDecision d = base(EnforcementDecision::Kind::Corrected, trig);
      d.position = position_;
      fill(d);
      d.rule_index = j;
      d.rule_name = rule.name;
      if (!suppress) {
        for (const auto& a : rule.corrections) {
          const auto* send = std::get_if<SendAction>(&a);
          if (!send) continue;  // drop actions only apply to command triggers
          const CommandSpec* spec = registry_.find_command(send->device, send->command);
          CommandMessage cmd{send->device, send->command, send->value,
                             CommandSource::Corrective, next_correlation_++};
          res.sends.push_back(cmd);
          pending_.push_back(
              Pending{state_key(send->device, spec->capability), spec->value, true});
          d.actions.push_back(a);
        }
        trim_pending();
      } else {
        d.note = "corrections suppressed: cascade budget exhausted";
      }
      res.records.push_back(std::move(d));
    }

    if (suppress && !unrecovered_) {
      unrecovered_ = true;
      EnforcementDecision d = base(EnforcementDecision::Kind::Unrecovered, trig);
      d.position = position_;
      d.note = "still violating after " + std::to_string(cfg_.cascade_budget) +
               " correction rounds";
      res.records.push_back(std::move(d));
    }
  }

  Policy policy_;
  DeviceRegistry registry_;
  ShadowState shadow_;
  EngineConfig cfg_;
  std::function<std::int64_t()> clock_;
  std::vector<Monitor> monitors_;
  std::deque<Pending> pending_;
  std::uint64_t position_ = 0;
  std::uint64_t next_correlation_ = 1;
  int rounds_ = 0;
  bool unrecovered_ = false;
};

}  // namespace warden
