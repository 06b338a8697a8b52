// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "warden/ast.hpp"
#include "warden/policy_json.hpp"
#include "warden/snapshot.hpp"
#include "warden/value.hpp"

namespace warden {

class RegistryError : public std::runtime_error {
 public:
  explicit RegistryError(const std::string& msg) : std::runtime_error("registry: " + msg) {}
};

class PolicyError : public std::runtime_error {
 public:
  explicit PolicyError(const std::string& msg) : std::runtime_error("policy: " + msg) {}
};

/// Coarse value kind used for load-time type checking; integers and reals
/// compare and mix freely, so they share one kind.
enum class ValueKind { Boolean, Numeric, String };

inline ValueKind kind_of(const Value& v) {
  if (std::holds_alternative<bool>(v)) return ValueKind::Boolean;
  if (std::holds_alternative<std::string>(v)) return ValueKind::String;
  return ValueKind::Numeric;
}

inline const char* kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Numeric: return "numeric";
    default: return "string";
  }
}

struct CapabilitySpec {
  enum class Direction { Sensor, Actuator, Both };

  Direction direction = Direction::Both;
  Value default_value;
  std::vector<Value> domain_values;  // enumerated domain; empty when is_range
  bool is_range = false;             // inclusive numeric range instead
  double range_min = 0.0;
  double range_max = 0.0;
  double range_step = 0.0;           // discretization grid for analysis
  bool int_range = false;
  std::string unit;                  // informational only

  ValueKind kind() const {
    return is_range ? ValueKind::Numeric : kind_of(domain_values.front());
  }

  bool writable_by_commands() const { return direction != Direction::Sensor; }
  bool updatable_by_environment() const { return direction != Direction::Actuator; }

  bool contains(const Value& v) const {
    if (is_range) {
      if (!is_numeric(v)) return false;
      if (int_range && !is_int(v)) return false;
      const double d = as_double(v);
      return d >= range_min && d <= range_max;
    }
    for (const auto& dv : domain_values)
      if (value_equal(dv, v)) return true;
    return false;
  }

  /// Finite domain for explicit-state analysis: the enumerated values, or
  /// the declared discretization grid of a numeric range (both endpoints
  /// always included).
  std::vector<Value> analysis_domain() const {
    if (!is_range) return domain_values;
    std::vector<Value> out;
    for (double v = range_min; v < range_max; v += range_step) {
      if (int_range)
        out.push_back(Value{static_cast<std::int64_t>(std::llround(v))});
      else
        out.push_back(Value{v});
    }
    if (int_range)
      out.push_back(Value{static_cast<std::int64_t>(std::llround(range_max))});
    else
      out.push_back(Value{range_max});
    return out;
  }
};

/// One command writes one capability with one declared value.
struct CommandSpec {
  std::string capability;
  Value value;
};

struct DeviceSpec {
  std::map<std::string, CapabilitySpec> capabilities;
  std::map<std::string, CommandSpec> commands;
};

struct DeviceRegistry {
  std::map<std::string, DeviceSpec> devices;

  const DeviceSpec* find_device(const std::string& dev) const {
    auto it = devices.find(dev);
    return it == devices.end() ? nullptr : &it->second;
  }
  const CapabilitySpec* find_capability(const std::string& dev, const std::string& cap) const {
    const DeviceSpec* d = find_device(dev);
    if (!d) return nullptr;
    auto it = d->capabilities.find(cap);
    return it == d->capabilities.end() ? nullptr : &it->second;
  }
  const CommandSpec* find_command(const std::string& dev, const std::string& cmd) const {
    const DeviceSpec* d = find_device(dev);
    if (!d) return nullptr;
    auto it = d->commands.find(cmd);
    return it == d->commands.end() ? nullptr : &it->second;
  }

  /// All variables in deterministic (sorted) order.
  std::vector<std::pair<std::string, const CapabilitySpec*>> variables() const {
    std::vector<std::pair<std::string, const CapabilitySpec*>> out;
    for (const auto& [dev, spec] : devices)
      for (const auto& [cap, cs] : spec.capabilities) out.emplace_back(dev + "." + cap, &cs);
    return out;
  }

  /// Total snapshot of declared defaults.
  StateSnapshot default_snapshot() const {
    StateSnapshot s;
    for (const auto& [dev, spec] : devices)
      for (const auto& [cap, cs] : spec.capabilities) s[dev + "." + cap] = cs.default_value;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace detail {

inline CapabilitySpec capability_from_json(const std::string& where, const Json& j) {
  if (!j.is_object()) throw RegistryError(where + ": capability must be an object");
  CapabilitySpec cs;
  if (j.contains("direction")) {
    const std::string d = j["direction"].get<std::string>();
    if (d == "sensor") {
      cs.direction = CapabilitySpec::Direction::Sensor;
    } else if (d == "actuator") {
      cs.direction = CapabilitySpec::Direction::Actuator;
    } else if (d == "both") {
      cs.direction = CapabilitySpec::Direction::Both;
    } else {
      throw RegistryError(where + ": direction must be sensor, actuator, or both");
    }
  }
  if (!j.contains("default")) throw RegistryError(where + ": missing \"default\"");
  cs.default_value = value_from_json(j["default"]);

  if (j.contains("domain")) {
    if (!j["domain"].is_array() || j["domain"].empty())
      throw RegistryError(where + ": \"domain\" must be a non-empty array");
    ValueKind k{};
    bool first = true;
    for (const auto& dv : j["domain"]) {
      Value v = value_from_json(dv);
      if (first) {
        k = kind_of(v);
        first = false;
      } else if (kind_of(v) != k) {
        throw RegistryError(where + ": mixed value kinds in domain");
      }
      cs.domain_values.push_back(std::move(v));
    }
  } else if (j.contains("min") && j.contains("max")) {
    cs.is_range = true;
    cs.int_range = j["min"].is_number_integer() && j["max"].is_number_integer();
    cs.range_min = j["min"].get<double>();
    cs.range_max = j["max"].get<double>();
    if (cs.range_min >= cs.range_max)
      throw RegistryError(where + ": range needs min < max");
    if (j.contains("step")) {
      cs.range_step = j["step"].get<double>();
      if (cs.range_step <= 0) throw RegistryError(where + ": step must be positive");
    } else {
      cs.range_step = cs.int_range ? 1.0 : (cs.range_max - cs.range_min) / 4.0;
    }
    if (j.contains("unit")) cs.unit = j["unit"].get<std::string>();
  } else {
    throw RegistryError(where + ": capability needs \"domain\" or \"min\"/\"max\"");
  }
  if (!cs.contains(cs.default_value))
    throw RegistryError(where + ": default value " + to_literal(cs.default_value) +
                        " lies outside the declared domain");
  return cs;
}

}  // namespace detail

inline DeviceRegistry registry_from_json(const Json& root) {
  if (!root.is_object() || !root.contains("devices") || !root["devices"].is_object())
    throw RegistryError("top level must be an object with a \"devices\" map");
  DeviceRegistry reg;
  for (const auto& [dev, jdev] : root["devices"].items()) {
    DeviceSpec spec;
    if (!jdev.is_object() || !jdev.contains("capabilities") ||
        !jdev["capabilities"].is_object() || jdev["capabilities"].empty())
      throw RegistryError(dev + ": device needs a non-empty \"capabilities\" map");
    for (const auto& [cap, jcap] : jdev["capabilities"].items())
      spec.capabilities[cap] = detail::capability_from_json(dev + "." + cap, jcap);
    if (jdev.contains("commands")) {
      if (!jdev["commands"].is_object())
        throw RegistryError(dev + ": \"commands\" must be a map");
      for (const auto& [cmd, jcmd] : jdev["commands"].items()) {
        const std::string where = dev + "." + cmd;
        if (!jcmd.is_object() || !jcmd.contains("capability") || !jcmd.contains("value"))
          throw RegistryError(where + ": command needs \"capability\" and \"value\"");
        CommandSpec cspec{jcmd["capability"].get<std::string>(),
                          value_from_json(jcmd["value"])};
        auto it = spec.capabilities.find(cspec.capability);
        if (it == spec.capabilities.end())
          throw RegistryError(where + ": effect targets unknown capability \"" +
                              cspec.capability + "\"");
        if (!it->second.writable_by_commands())
          throw RegistryError(where + ": effect targets sensor capability \"" +
                              cspec.capability + "\"");
        if (!it->second.contains(cspec.value))
          throw RegistryError(where + ": effect value " + to_literal(cspec.value) +
                              " lies outside the domain of \"" + cspec.capability + "\"");
        spec.commands[cmd] = std::move(cspec);
      }
    }
    reg.devices[dev] = std::move(spec);
  }
  return reg;
}

inline DeviceRegistry load_registry(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw RegistryError(e.what());
  }
  return registry_from_json(j);
}

// ---------------------------------------------------------------------------
// Policy / registry cross-validation
// ---------------------------------------------------------------------------

namespace detail {

inline ValueKind term_kind(const Term& t, const DeviceRegistry& reg, const std::string& rule) {
  if (const auto* v = std::get_if<VariableRef>(&t.node)) {
    const CapabilitySpec* cs = reg.find_capability(v->device, v->capability);
    if (!cs)
      throw PolicyError(rule + ": variable " + v->qualified() +
                        " does not resolve against the registry");
    return cs->kind();
  }
  if (const auto* c = std::get_if<Value>(&t.node)) return kind_of(*c);
  const auto& f = std::get<FunctionApp>(t.node);
  const ValueKind l = term_kind(*f.left, reg, rule);
  const ValueKind r = term_kind(*f.right, reg, rule);
  if (l != ValueKind::Numeric || r != ValueKind::Numeric)
    throw PolicyError(rule + ": arithmetic over non-numeric operands (" + kind_name(l) +
                      " " + arith_symbol(f.op) + " " + kind_name(r) + ")");
  return ValueKind::Numeric;
}

inline void check_pred(const Predicate& p, const DeviceRegistry& reg, const std::string& rule) {
  if (std::holds_alternative<PredTrue>(p.node)) return;
  if (const auto* r = std::get_if<Relational>(&p.node)) {
    const ValueKind l = term_kind(r->left, reg, rule);
    const ValueKind rt = term_kind(r->right, reg, rule);
    if (rel_is_equality(r->op)) {
      if (l != rt)
        throw PolicyError(rule + ": comparison \"" + render_predicate(p) + "\" mixes " +
                          kind_name(l) + " and " + kind_name(rt));
    } else if (l != ValueKind::Numeric || rt != ValueKind::Numeric) {
      throw PolicyError(rule + ": ordering \"" + render_predicate(p) +
                        "\" needs numeric operands");
    }
    return;
  }
  if (const auto* a = std::get_if<PredAnd>(&p.node)) {
    check_pred(*a->left, reg, rule);
    check_pred(*a->right, reg, rule);
    return;
  }
  check_pred(*std::get<PredNot>(p.node).arg, reg, rule);
}

inline void check_then(const ThenCondition& t, const DeviceRegistry& reg,
                       const std::string& rule) {
  if (const auto* p = std::get_if<Predicate>(&t.node)) {
    check_pred(*p, reg, rule);
    return;
  }
  if (const auto* s = std::get_if<Since>(&t.node)) {
    check_then(*s->left, reg, rule);
    check_then(*s->right, reg, rule);
    return;
  }
  check_then(*std::get<Yesterday>(t.node).arg, reg, rule);
}

}  // namespace detail

/// Load-time resolution and type check of a policy against a registry:
/// every variable resolves, relational operands have compatible kinds, and
/// every corrective action names a declared device command.
inline void validate_policy(const Policy& p, const DeviceRegistry& reg) {
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const PolicyRule& r = p.rules[i];
    const std::string rule =
        r.name.empty() ? "rule #" + std::to_string(i + 1) : "rule " + r.name;
    detail::check_pred(r.invariant.if_cond, reg, rule);
    detail::check_then(r.invariant.then_cond, reg, rule);
    for (const auto& a : r.corrections) {
      if (const auto* d = std::get_if<DropAction>(&a)) {
        const DeviceSpec* dev = reg.find_device(d->device);
        if (!dev) throw PolicyError(rule + ": drop names unknown device " + d->device);
        if (d->command != "*" && !dev->commands.count(d->command))
          throw PolicyError(rule + ": drop names unknown command " + d->device + "." +
                            d->command);
      } else {
        const auto& s = std::get<SendAction>(a);
        if (!reg.find_command(s.device, s.command))
          throw PolicyError(rule + ": send names unknown command " + s.device + "." +
                            s.command);
      }
    }
  }
}

}  // namespace warden
