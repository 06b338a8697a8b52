// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>

#include "warden/ast.hpp"
#include "warden/value.hpp"

namespace warden {

/// One observation of the whole system state: device.capability -> value.
using StateSnapshot = std::unordered_map<std::string, Value>;

inline std::string state_key(const std::string& device, const std::string& capability) {
  return device + "." + capability;
}

/// Raised when a formula cannot be evaluated against a snapshot (unknown
/// variable or operand type mismatch).
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline Value eval_term(const Term& t, const StateSnapshot& snap) {
  if (const auto* v = std::get_if<VariableRef>(&t.node)) {
    auto it = snap.find(v->qualified());
    if (it == snap.end()) throw EvalError("unknown variable " + v->qualified());
    return it->second;
  }
  if (const auto* c = std::get_if<Value>(&t.node)) return *c;
  const auto& f = std::get<FunctionApp>(t.node);
  const Value l = eval_term(*f.left, snap);
  const Value r = eval_term(*f.right, snap);
  if (!is_numeric(l) || !is_numeric(r))
    throw EvalError(std::string("arithmetic '") + arith_symbol(f.op) +
                    "' needs numeric operands, got " + type_name(l) + " and " + type_name(r));
  if (is_int(l) && is_int(r)) {
    const auto a = std::get<std::int64_t>(l), b = std::get<std::int64_t>(r);
    switch (f.op) {
      case ArithOp::Add: return Value{a + b};
      case ArithOp::Sub: return Value{a - b};
      default: return Value{a * b};
    }
  }
  const double a = as_double(l), b = as_double(r);
  switch (f.op) {
    case ArithOp::Add: return Value{a + b};
    case ArithOp::Sub: return Value{a - b};
    default: return Value{a * b};
  }
}

/// Equality works across all types (mixed int/real compare numerically, any
/// other cross-type comparison is simply unequal); ordering needs numbers.
inline bool eval_relational(const Relational& rel, const StateSnapshot& snap) {
  const Value l = eval_term(rel.left, snap);
  const Value r = eval_term(rel.right, snap);
  if (rel_is_equality(rel.op)) {
    const bool eq = value_equal(l, r);
    return rel.op == RelOp::Eq ? eq : !eq;
  }
  if (!is_numeric(l) || !is_numeric(r))
    throw EvalError(std::string("comparison '") + rel_symbol(rel.op) +
                    "' needs numeric operands, got " + type_name(l) + " and " + type_name(r));
  const double a = as_double(l), b = as_double(r);
  switch (rel.op) {
    case RelOp::Lt: return a < b;
    case RelOp::Le: return a <= b;
    case RelOp::Gt: return a > b;
    default: return a >= b;
  }
}

// Deliberately strict (both conjuncts always evaluated) so that evaluation
// errors surface identically here and in the incremental monitor, which
// computes every leaf at every step.
inline bool eval_predicate(const Predicate& p, const StateSnapshot& snap) {
  if (std::holds_alternative<PredTrue>(p.node)) return true;
  if (const auto* r = std::get_if<Relational>(&p.node)) return eval_relational(*r, snap);
  if (const auto* a = std::get_if<PredAnd>(&p.node)) {
    const bool l = eval_predicate(*a->left, snap);
    const bool r = eval_predicate(*a->right, snap);
    return l && r;
  }
  return !eval_predicate(*std::get<PredNot>(p.node).arg, snap);
}

}  // namespace warden
