// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "warden/value.hpp"

namespace warden {

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// Reference to one device state variable, e.g. FrontDoorLock.status.
struct VariableRef {
  std::string device;
  std::string capability;

  friend bool operator==(const VariableRef&, const VariableRef&) = default;
  std::string qualified() const { return device + "." + capability; }
};

enum class ArithOp { Add, Sub, Mul };

inline const char* arith_symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    default: return "*";
  }
}

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Binary arithmetic application over numeric terms. The function set is
/// fixed to {+, -, *}.
struct FunctionApp {
  ArithOp op;
  TermPtr left;
  TermPtr right;
};

struct Term {
  std::variant<VariableRef, Value, FunctionApp> node;
};

inline TermPtr make_term(Term t) { return std::make_shared<const Term>(std::move(t)); }
inline Term term_var(std::string device, std::string capability) {
  return Term{VariableRef{std::move(device), std::move(capability)}};
}
inline Term term_const(Value v) { return Term{std::move(v)}; }
inline Term term_fn(ArithOp op, Term l, Term r) {
  return Term{FunctionApp{op, make_term(std::move(l)), make_term(std::move(r))}};
}

inline bool term_equal(const Term& a, const Term& b);

inline bool term_equal(const TermPtr& a, const TermPtr& b) { return term_equal(*a, *b); }

inline bool term_equal(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* v = std::get_if<VariableRef>(&a.node))
    return *v == std::get<VariableRef>(b.node);
  if (const auto* c = std::get_if<Value>(&a.node)) return *c == std::get<Value>(b.node);
  const auto& fa = std::get<FunctionApp>(a.node);
  const auto& fb = std::get<FunctionApp>(b.node);
  return fa.op == fb.op && term_equal(fa.left, fb.left) && term_equal(fa.right, fb.right);
}

// ---------------------------------------------------------------------------
// Predicates (the Phi / p layer: no temporal operators)
// ---------------------------------------------------------------------------

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* rel_symbol(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    default: return ">=";
  }
}

inline bool rel_is_equality(RelOp op) { return op == RelOp::Eq || op == RelOp::Ne; }

struct Predicate;
using PredPtr = std::shared_ptr<const Predicate>;

struct Relational {
  Term left;
  RelOp op;
  Term right;
};
struct PredAnd {
  PredPtr left;
  PredPtr right;
};
struct PredNot {
  PredPtr arg;
};
struct PredTrue {};

struct Predicate {
  std::variant<PredTrue, Relational, PredAnd, PredNot> node;
};

inline PredPtr make_pred(Predicate p) { return std::make_shared<const Predicate>(std::move(p)); }
inline Predicate pred_true() { return Predicate{PredTrue{}}; }
inline Predicate pred_rel(Term l, RelOp op, Term r) {
  return Predicate{Relational{std::move(l), op, std::move(r)}};
}
inline Predicate pred_and(Predicate l, Predicate r) {
  return Predicate{PredAnd{make_pred(std::move(l)), make_pred(std::move(r))}};
}
inline Predicate pred_not(Predicate p) { return Predicate{PredNot{make_pred(std::move(p))}}; }

inline bool pred_equal(const Predicate& a, const Predicate& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<PredTrue>(a.node)) return true;
  if (const auto* r = std::get_if<Relational>(&a.node)) {
    const auto& rb = std::get<Relational>(b.node);
    return r->op == rb.op && term_equal(r->left, rb.left) && term_equal(r->right, rb.right);
  }
  if (const auto* c = std::get_if<PredAnd>(&a.node)) {
    const auto& cb = std::get<PredAnd>(b.node);
    return pred_equal(*c->left, *cb.left) && pred_equal(*c->right, *cb.right);
  }
  const auto& n = std::get<PredNot>(a.node);
  return pred_equal(*n.arg, *std::get<PredNot>(b.node).arg);
}

// ---------------------------------------------------------------------------
// Then-conditions (the Psi layer: predicates plus since / yesterday)
// ---------------------------------------------------------------------------

struct ThenCondition;
using ThenPtr = std::shared_ptr<const ThenCondition>;

struct Since {
  ThenPtr left;
  ThenPtr right;
};
struct Yesterday {
  ThenPtr arg;
};

struct ThenCondition {
  std::variant<Predicate, Since, Yesterday> node;
};

inline ThenPtr make_then(ThenCondition t) {
  return std::make_shared<const ThenCondition>(std::move(t));
}
inline ThenCondition then_pred(Predicate p) { return ThenCondition{std::move(p)}; }
inline ThenCondition then_since(ThenCondition l, ThenCondition r) {
  return ThenCondition{Since{make_then(std::move(l)), make_then(std::move(r))}};
}
inline ThenCondition then_yesterday(ThenCondition t) {
  return ThenCondition{Yesterday{make_then(std::move(t))}};
}

inline bool then_is_temporal(const ThenCondition& t) {
  return !std::holds_alternative<Predicate>(t.node);
}

inline bool then_equal(const ThenCondition& a, const ThenCondition& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* p = std::get_if<Predicate>(&a.node))
    return pred_equal(*p, std::get<Predicate>(b.node));
  if (const auto* s = std::get_if<Since>(&a.node)) {
    const auto& sb = std::get<Since>(b.node);
    return then_equal(*s->left, *sb.left) && then_equal(*s->right, *sb.right);
  }
  return then_equal(*std::get<Yesterday>(a.node).arg, *std::get<Yesterday>(b.node).arg);
}

// ---------------------------------------------------------------------------
// Invariants, corrective actions, policies
// ---------------------------------------------------------------------------

/// "If <if_cond> is true then <then_cond> must be true", evaluated at every
/// trace position as (not if_cond) or then_cond. Temporal operators are only
/// admitted under then_cond.
struct Invariant {
  Predicate if_cond;
  ThenCondition then_cond;
};

inline bool invariant_equal(const Invariant& a, const Invariant& b) {
  return pred_equal(a.if_cond, b.if_cond) && then_equal(a.then_cond, b.then_cond);
}

/// Discard a pending command. command == "*" matches every command of the
/// device. Only meaningful when a command trigger caused the violation.
struct DropAction {
  std::string device;
  std::string command;

  friend bool operator==(const DropAction&, const DropAction&) = default;
  bool matches(const std::string& dev, const std::string& cmd) const {
    return device == dev && (command == "*" || command == cmd);
  }
};

/// Issue a device command, optionally with a payload value.
struct SendAction {
  std::string device;
  std::string command;
  std::optional<Value> value;

  friend bool operator==(const SendAction&, const SendAction&) = default;
};

using CorrectiveAction = std::variant<DropAction, SendAction>;

inline bool action_equal(const CorrectiveAction& a, const CorrectiveAction& b) { return a == b; }

struct PolicyRule {
  std::string name;  // may be empty for anonymous rules
  Invariant invariant;
  std::vector<CorrectiveAction> corrections;
};

inline bool rule_equal(const PolicyRule& a, const PolicyRule& b) {
  return a.name == b.name && invariant_equal(a.invariant, b.invariant) &&
         a.corrections == b.corrections;
}

/// Ordered rule sequence; violations are processed in rule order.
struct Policy {
  std::vector<PolicyRule> rules;
};

inline bool policy_equal(const Policy& a, const Policy& b) {
  return std::equal(a.rules.begin(), a.rules.end(), b.rules.begin(), b.rules.end(), rule_equal);
}

// ---------------------------------------------------------------------------
// Size and depth metrics (used by the synthesizer's candidate ordering)
// ---------------------------------------------------------------------------

inline int pred_size(const Predicate& p) {
  if (std::holds_alternative<PredTrue>(p.node) || std::holds_alternative<Relational>(p.node))
    return 1;
  if (const auto* a = std::get_if<PredAnd>(&p.node))
    return 1 + pred_size(*a->left) + pred_size(*a->right);
  return 1 + pred_size(*std::get<PredNot>(p.node).arg);
}

inline int then_size(const ThenCondition& t) {
  if (const auto* p = std::get_if<Predicate>(&t.node)) return pred_size(*p);
  if (const auto* s = std::get_if<Since>(&t.node))
    return 1 + then_size(*s->left) + then_size(*s->right);
  return 1 + then_size(*std::get<Yesterday>(t.node).arg);
}

/// Node count of the whole formula tree, implication root included.
inline int invariant_size(const Invariant& inv) {
  return 1 + pred_size(inv.if_cond) + then_size(inv.then_cond);
}

inline int pred_depth(const Predicate& p) {
  if (std::holds_alternative<PredTrue>(p.node) || std::holds_alternative<Relational>(p.node))
    return 1;
  if (const auto* a = std::get_if<PredAnd>(&p.node))
    return 1 + std::max(pred_depth(*a->left), pred_depth(*a->right));
  return 1 + pred_depth(*std::get<PredNot>(p.node).arg);
}

inline int then_depth(const ThenCondition& t) {
  if (const auto* p = std::get_if<Predicate>(&t.node)) return pred_depth(*p);
  if (const auto* s = std::get_if<Since>(&t.node))
    return 1 + std::max(then_depth(*s->left), then_depth(*s->right));
  return 1 + then_depth(*std::get<Yesterday>(t.node).arg);
}

inline int invariant_depth(const Invariant& inv) {
  return 1 + std::max(pred_depth(inv.if_cond), then_depth(inv.then_cond));
}

// ---------------------------------------------------------------------------
// Canonical rendering. parse(render(x)) is structurally equal to x.
// ---------------------------------------------------------------------------

namespace detail {

// Term precedence: Mul binds tighter than Add/Sub; Add/Sub are left
// associative, so a right child at equal precedence needs parentheses.
inline int term_prec(const Term& t) {
  if (const auto* f = std::get_if<FunctionApp>(&t.node))
    return f->op == ArithOp::Mul ? 2 : 1;
  return 3;
}

inline void render_term(const Term& t, std::string& out) {
  if (const auto* v = std::get_if<VariableRef>(&t.node)) {
    out += v->qualified();
    return;
  }
  if (const auto* c = std::get_if<Value>(&t.node)) {
    out += to_literal(*c);
    return;
  }
  const auto& f = std::get<FunctionApp>(t.node);
  const int prec = term_prec(t);
  const bool pl = term_prec(*f.left) < prec;
  const bool pr = term_prec(*f.right) <= prec;
  if (pl) out += '(';
  render_term(*f.left, out);
  if (pl) out += ')';
  out += ' ';
  out += arith_symbol(f.op);
  out += ' ';
  if (pr) out += '(';
  render_term(*f.right, out);
  if (pr) out += ')';
}

// Predicate rendering: 'and' chains stay flat on the left; 'not' over a
// relational or an 'and' group is parenthesized for readability.
inline void render_pred(const Predicate& p, std::string& out) {
  if (std::holds_alternative<PredTrue>(p.node)) {
    out += "true";
    return;
  }
  if (const auto* r = std::get_if<Relational>(&p.node)) {
    render_term(r->left, out);
    out += ' ';
    out += rel_symbol(r->op);
    out += ' ';
    render_term(r->right, out);
    return;
  }
  if (const auto* a = std::get_if<PredAnd>(&p.node)) {
    render_pred(*a->left, out);
    out += " and ";
    const bool pr = std::holds_alternative<PredAnd>(a->right->node);
    if (pr) out += '(';
    render_pred(*a->right, out);
    if (pr) out += ')';
    return;
  }
  const auto& n = std::get<PredNot>(p.node);
  out += "not ";
  const bool par = std::holds_alternative<PredAnd>(n.arg->node) ||
                   std::holds_alternative<Relational>(n.arg->node);
  if (par) out += '(';
  render_pred(*n.arg, out);
  if (par) out += ')';
}

// A then-condition operand gets parentheses when it is a 'since' in right or
// argument position (associativity/binding) or an 'and' chain embedded under
// a temporal operator (readability; both forms reparse identically).
inline bool then_operand_parens(const ThenCondition& t) {
  if (std::holds_alternative<Since>(t.node)) return true;
  if (const auto* p = std::get_if<Predicate>(&t.node))
    return std::holds_alternative<PredAnd>(p->node);
  return false;
}

inline void render_then(const ThenCondition& t, std::string& out) {
  if (const auto* p = std::get_if<Predicate>(&t.node)) {
    render_pred(*p, out);
    return;
  }
  if (const auto* s = std::get_if<Since>(&t.node)) {
    const bool pl = !std::holds_alternative<Since>(s->left->node) && then_operand_parens(*s->left);
    if (pl) out += '(';
    render_then(*s->left, out);
    if (pl) out += ')';
    out += " since ";
    const bool pr = then_operand_parens(*s->right);
    if (pr) out += '(';
    render_then(*s->right, out);
    if (pr) out += ')';
    return;
  }
  const auto& y = std::get<Yesterday>(t.node);
  out += "yesterday ";
  const bool par = then_operand_parens(*y.arg);
  if (par) out += '(';
  render_then(*y.arg, out);
  if (par) out += ')';
}

}  // namespace detail

inline std::string render_term(const Term& t) {
  std::string out;
  detail::render_term(t, out);
  return out;
}

inline std::string render_predicate(const Predicate& p) {
  std::string out;
  detail::render_pred(p, out);
  return out;
}

inline std::string render_then_condition(const ThenCondition& t) {
  std::string out;
  detail::render_then(t, out);
  return out;
}

inline std::string render_invariant(const Invariant& inv) {
  std::string out = "IF ";
  detail::render_pred(inv.if_cond, out);
  out += " THEN ";
  detail::render_then(inv.then_cond, out);
  return out;
}

inline std::string render_action(const CorrectiveAction& a) {
  if (const auto* d = std::get_if<DropAction>(&a))
    return "drop(" + d->device + "." + d->command + ")";
  const auto& s = std::get<SendAction>(a);
  std::string out = "send(" + s.device + "." + s.command;
  if (s.value) out += "=" + to_literal(*s.value);
  out += ")";
  return out;
}

inline std::string render_rule(const PolicyRule& r) {
  std::string out;
  if (!r.name.empty()) out += "RULE " + r.name + " ";
  out += render_invariant(r.invariant);
  if (!r.corrections.empty()) {
    out += " CORRECT ";
    for (size_t i = 0; i < r.corrections.size(); ++i) {
      if (i) out += "; ";
      out += render_action(r.corrections[i]);
    }
  }
  return out;
}

/// Canonical policy text. Empty policy renders to empty text.
inline std::string render_policy(const Policy& p) {
  std::string out;
  for (const auto& rule : p.rules) {
    out += render_rule(rule);
    out += '\n';
  }
  return out;
}

}  // namespace warden
