// SPDX-License-Identifier: Apache-2.0
//
// Reference semantics for invariant evaluation, used to cross-check the
// incremental monitor. Everything here is recomputed from the whole trace
// prefix at every position, straight from the declarative definitions:
//
//   yesterday f  holds at i  iff  i > 0 and f holds at i-1
//   f since g    holds at i  iff  g holds at some j <= i and
//                                 f holds at every k with j < k <= i
//   IF a THEN b  holds at i  iff  a does not hold at i, or b holds at i
//
// This file intentionally re-implements term and predicate evaluation from
// scratch; it must not include the library's evaluation or monitor headers.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "warden/ast.hpp"
#include "warden/value.hpp"

namespace warden::oracle {

using Snapshot = std::unordered_map<std::string, Value>;
using Trace = std::vector<Snapshot>;

inline double numeric(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw std::runtime_error("oracle: operand is not numeric");
}

inline Value term_at(const Term& t, const Snapshot& snap) {
  if (const auto* var = std::get_if<VariableRef>(&t.node)) {
    auto it = snap.find(var->device + "." + var->capability);
    if (it == snap.end()) throw std::runtime_error("oracle: unknown variable");
    return it->second;
  }
  if (const auto* c = std::get_if<Value>(&t.node)) return *c;
  const auto& f = std::get<FunctionApp>(t.node);
  const Value l = term_at(*f.left, snap);
  const Value r = term_at(*f.right, snap);
  const bool both_int =
      std::holds_alternative<std::int64_t>(l) && std::holds_alternative<std::int64_t>(r);
  if (both_int) {
    const auto a = std::get<std::int64_t>(l), b = std::get<std::int64_t>(r);
    if (f.op == ArithOp::Add) return Value{a + b};
    if (f.op == ArithOp::Sub) return Value{a - b};
    return Value{a * b};
  }
  const double a = numeric(l), b = numeric(r);
  if (f.op == ArithOp::Add) return Value{a + b};
  if (f.op == ArithOp::Sub) return Value{a - b};
  return Value{a * b};
}

inline bool values_eq(const Value& l, const Value& r) {
  const bool l_num =
      std::holds_alternative<std::int64_t>(l) || std::holds_alternative<double>(l);
  const bool r_num =
      std::holds_alternative<std::int64_t>(r) || std::holds_alternative<double>(r);
  if (l_num && r_num) return numeric(l) == numeric(r);
  if (l.index() != r.index()) return false;
  return l == r;
}

inline bool pred_at(const Predicate& p, const Snapshot& snap) {
  if (std::holds_alternative<PredTrue>(p.node)) return true;
  if (const auto* rel = std::get_if<Relational>(&p.node)) {
    const Value l = term_at(rel->left, snap);
    const Value r = term_at(rel->right, snap);
    switch (rel->op) {
      case RelOp::Eq: return values_eq(l, r);
      case RelOp::Ne: return !values_eq(l, r);
      case RelOp::Lt: return numeric(l) < numeric(r);
      case RelOp::Le: return numeric(l) <= numeric(r);
      case RelOp::Gt: return numeric(l) > numeric(r);
      default: return numeric(l) >= numeric(r);
    }
  }
  if (const auto* a = std::get_if<PredAnd>(&p.node)) {
    const bool l = pred_at(*a->left, snap);
    const bool r = pred_at(*a->right, snap);
    return l && r;
  }
  return !pred_at(*std::get<PredNot>(p.node).arg, snap);
}

inline bool then_at(const ThenCondition& t, const Trace& trace, std::size_t i) {
  if (const auto* p = std::get_if<Predicate>(&t.node)) return pred_at(*p, trace[i]);
  if (const auto* y = std::get_if<Yesterday>(&t.node))
    return i > 0 && then_at(*y->arg, trace, i - 1);
  const auto& s = std::get<Since>(t.node);
  for (std::size_t j = 0; j <= i; ++j) {
    if (!then_at(*s.right, trace, j)) continue;
    bool all = true;
    for (std::size_t k = j + 1; k <= i; ++k) {
      if (!then_at(*s.left, trace, k)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

inline bool invariant_at(const Invariant& inv, const Trace& trace, std::size_t i) {
  if (!pred_at(inv.if_cond, trace[i])) return true;
  return then_at(inv.then_cond, trace, i);
}

/// Per-position verdicts over a whole trace.
inline std::vector<bool> verdicts(const Invariant& inv, const Trace& trace) {
  std::vector<bool> out;
  out.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) out.push_back(invariant_at(inv, trace, i));
  return out;
}

}  // namespace warden::oracle
