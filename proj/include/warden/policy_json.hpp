// SPDX-License-Identifier: Apache-2.0
//
// JSON form of policies, structurally equivalent to the DSL: one object per
// rule with "if" / "then" / "correct" fields of nested tagged nodes.
//
//   term:       {"var":"Device.capability"} | {"const": <json value>}
//             | {"op":"add"|"sub"|"mul", "left": term, "right": term}
//   predicate:  {"op":"true"}
//             | {"op":"eq"|"ne"|"lt"|"le"|"gt"|"ge", "left": term, "right": term}
//             | {"op":"and", "left": predicate, "right": predicate}
//             | {"op":"not", "arg": predicate}
//   then:       predicate | {"op":"since", "left": then, "right": then}
//                         | {"op":"yesterday", "arg": then}
//   action:     {"action":"drop", "device":D, "command":C}       (C may be "*")
//             | {"action":"send", "device":D, "command":C[, "value": v]}
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "warden/ast.hpp"
#include "warden/value.hpp"

namespace warden {

using Json = nlohmann::json;

// ---- Value <-> JSON -------------------------------------------------------

inline Json value_to_json(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

inline Value value_from_json(const Json& j) {
  if (j.is_boolean()) return Value{j.get<bool>()};
  if (j.is_number_integer()) return Value{j.get<std::int64_t>()};
  if (j.is_number_float()) return Value{j.get<double>()};
  if (j.is_string()) return Value{j.get<std::string>()};
  throw std::runtime_error("policy json: expected a scalar value, got " +
                           std::string(j.type_name()));
}

// ---- serialization --------------------------------------------------------

inline Json term_to_json(const Term& t) {
  if (const auto* v = std::get_if<VariableRef>(&t.node)) return Json{{"var", v->qualified()}};
  if (const auto* c = std::get_if<Value>(&t.node)) return Json{{"const", value_to_json(*c)}};
  const auto& f = std::get<FunctionApp>(t.node);
  const char* op = f.op == ArithOp::Add ? "add" : f.op == ArithOp::Sub ? "sub" : "mul";
  return Json{{"op", op}, {"left", term_to_json(*f.left)}, {"right", term_to_json(*f.right)}};
}

inline Json pred_to_json(const Predicate& p) {
  if (std::holds_alternative<PredTrue>(p.node)) return Json{{"op", "true"}};
  if (const auto* r = std::get_if<Relational>(&p.node)) {
    const char* op = nullptr;
    switch (r->op) {
      case RelOp::Eq: op = "eq"; break;
      case RelOp::Ne: op = "ne"; break;
      case RelOp::Lt: op = "lt"; break;
      case RelOp::Le: op = "le"; break;
      case RelOp::Gt: op = "gt"; break;
      default: op = "ge"; break;
    }
    return Json{{"op", op}, {"left", term_to_json(r->left)}, {"right", term_to_json(r->right)}};
  }
  if (const auto* a = std::get_if<PredAnd>(&p.node))
    return Json{{"op", "and"}, {"left", pred_to_json(*a->left)},
                {"right", pred_to_json(*a->right)}};
  return Json{{"op", "not"}, {"arg", pred_to_json(*std::get<PredNot>(p.node).arg)}};
}

inline Json then_to_json(const ThenCondition& t) {
  if (const auto* p = std::get_if<Predicate>(&t.node)) return pred_to_json(*p);
  if (const auto* s = std::get_if<Since>(&t.node))
    return Json{{"op", "since"}, {"left", then_to_json(*s->left)},
                {"right", then_to_json(*s->right)}};
  return Json{{"op", "yesterday"}, {"arg", then_to_json(*std::get<Yesterday>(t.node).arg)}};
}

inline Json action_to_json(const CorrectiveAction& a) {
  if (const auto* d = std::get_if<DropAction>(&a))
    return Json{{"action", "drop"}, {"device", d->device}, {"command", d->command}};
  const auto& s = std::get<SendAction>(a);
  Json j{{"action", "send"}, {"device", s.device}, {"command", s.command}};
  if (s.value) j["value"] = value_to_json(*s.value);
  return j;
}

inline Json policy_to_json(const Policy& p) {
  Json rules = Json::array();
  for (const auto& r : p.rules) {
    Json jr;
    if (!r.name.empty()) jr["name"] = r.name;
    jr["if"] = pred_to_json(r.invariant.if_cond);
    jr["then"] = then_to_json(r.invariant.then_cond);
    if (!r.corrections.empty()) {
      Json acts = Json::array();
      for (const auto& a : r.corrections) acts.push_back(action_to_json(a));
      jr["correct"] = acts;
    }
    rules.push_back(std::move(jr));
  }
  return Json{{"rules", std::move(rules)}};
}

// ---- deserialization ------------------------------------------------------

namespace detail {

[[noreturn]] inline void bad_policy_json(const std::string& what, const Json& at) {
  throw std::runtime_error("policy json: " + what + " in " + at.dump());
}

inline const Json& need(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad_policy_json(std::string("missing field \"") + key + "\"", j);
  return *it;
}

inline std::pair<std::string, std::string> split_var(const std::string& q, const Json& at) {
  const auto dot = q.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == q.size())
    bad_policy_json("\"var\" must be Device.capability, got \"" + q + "\"", at);
  return {q.substr(0, dot), q.substr(dot + 1)};
}

inline Term term_from_json(const Json& j) {
  if (!j.is_object()) bad_policy_json("term must be an object", j);
  if (j.contains("var")) {
    auto [dev, cap] = split_var(need(j, "var").get<std::string>(), j);
    return term_var(std::move(dev), std::move(cap));
  }
  if (j.contains("const")) return term_const(value_from_json(need(j, "const")));
  const std::string op = need(j, "op").get<std::string>();
  ArithOp a;
  if (op == "add") {
    a = ArithOp::Add;
  } else if (op == "sub") {
    a = ArithOp::Sub;
  } else if (op == "mul") {
    a = ArithOp::Mul;
  } else {
    bad_policy_json("unknown term op \"" + op + "\"", j);
  }
  return term_fn(a, term_from_json(need(j, "left")), term_from_json(need(j, "right")));
}

inline ThenCondition then_from_json(const Json& j);

inline Predicate pred_from_json(const Json& j) {
  ThenCondition t = then_from_json(j);
  if (then_is_temporal(t))
    bad_policy_json("temporal operator is only allowed in \"then\"", j);
  return std::get<Predicate>(std::move(t.node));
}

inline ThenCondition then_from_json(const Json& j) {
  if (!j.is_object()) bad_policy_json("formula must be an object", j);
  const std::string op = need(j, "op").get<std::string>();
  if (op == "true") return then_pred(pred_true());
  if (op == "and")
    return then_pred(
        pred_and(pred_from_json(need(j, "left")), pred_from_json(need(j, "right"))));
  if (op == "not") return then_pred(pred_not(pred_from_json(need(j, "arg"))));
  if (op == "since")
    return then_since(then_from_json(need(j, "left")), then_from_json(need(j, "right")));
  if (op == "yesterday") return then_yesterday(then_from_json(need(j, "arg")));
  RelOp r;
  if (op == "eq") {
    r = RelOp::Eq;
  } else if (op == "ne") {
    r = RelOp::Ne;
  } else if (op == "lt") {
    r = RelOp::Lt;
  } else if (op == "le") {
    r = RelOp::Le;
  } else if (op == "gt") {
    r = RelOp::Gt;
  } else if (op == "ge") {
    r = RelOp::Ge;
  } else {
    bad_policy_json("unknown op \"" + op + "\"", j);
  }
  return then_pred(
      pred_rel(term_from_json(need(j, "left")), r, term_from_json(need(j, "right"))));
}

inline CorrectiveAction action_from_json(const Json& j) {
  const std::string kind = need(j, "action").get<std::string>();
  std::string device = need(j, "device").get<std::string>();
  std::string command = need(j, "command").get<std::string>();
  if (kind == "drop") {
    if (j.contains("value")) bad_policy_json("drop takes no value", j);
    return DropAction{std::move(device), std::move(command)};
  }
  if (kind != "send") bad_policy_json("unknown action \"" + kind + "\"", j);
  if (command == "*") bad_policy_json("send does not accept the \"*\" wildcard", j);
  SendAction s{std::move(device), std::move(command), std::nullopt};
  if (j.contains("value")) s.value = value_from_json(j["value"]);
  return s;
}

}  // namespace detail

inline Policy policy_from_json(const Json& j) {
  const Json& rules = detail::need(j, "rules");
  if (!rules.is_array()) detail::bad_policy_json("\"rules\" must be an array", j);
  Policy p;
  for (const Json& jr : rules) {
    PolicyRule r;
    if (jr.contains("name")) r.name = jr["name"].get<std::string>();
    r.invariant.if_cond = detail::pred_from_json(detail::need(jr, "if"));
    r.invariant.then_cond = detail::then_from_json(detail::need(jr, "then"));
    if (jr.contains("correct")) {
      if (!jr["correct"].is_array()) detail::bad_policy_json("\"correct\" must be an array", jr);
      for (const Json& ja : jr["correct"]) r.corrections.push_back(detail::action_from_json(ja));
    }
    p.rules.push_back(std::move(r));
  }
  return p;
}

inline Policy policy_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(std::string("policy json: ") + e.what());
  }
  return policy_from_json(j);
}

}  // namespace warden
