// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random generators for differential and round-trip tests:
// a small typed variable universe, well-typed random formulas over it, and
// random traces that mostly mutate one variable per step.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "warden/ast.hpp"
#include "warden/value.hpp"

namespace warden::testgen {

using Rng = std::mt19937_64;
using Snapshot = std::unordered_map<std::string, Value>;

struct VarSpec {
  std::string device;
  std::string capability;
  bool numeric;                // eligible for arithmetic and ordering
  std::vector<Value> pool;     // candidate values (used by snapshots and literals)
};

inline const std::vector<VarSpec>& universe() {
  static const std::vector<VarSpec> vars = {
      {"Thermostat", "reading", true, {Value{std::int64_t{-3}}, Value{std::int64_t{0}},
                                       Value{std::int64_t{1}}, Value{std::int64_t{2}},
                                       Value{std::int64_t{3}}}},
      {"Thermostat", "target", true, {Value{std::int64_t{0}}, Value{std::int64_t{1}},
                                      Value{std::int64_t{2}}}},
      // Exact binary fractions keep double comparisons reproducible.
      {"Meter", "level", true, {Value{0.0}, Value{0.5}, Value{1.5}, Value{2.25}}},
      {"HomeMode", "status", false, {Value{std::string{"Home"}}, Value{std::string{"Away"}},
                                     Value{std::string{"Sleeping"}}}},
      {"Door", "locked", false, {Value{true}, Value{false}}},
  };
  return vars;
}

inline int irand(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline const Value& pick(Rng& rng, const std::vector<Value>& pool) {
  return pool[static_cast<std::size_t>(irand(rng, 0, static_cast<int>(pool.size()) - 1))];
}

inline const VarSpec& pick_var(Rng& rng, bool numeric) {
  const auto& vars = universe();
  while (true) {
    const auto& v = vars[static_cast<std::size_t>(irand(rng, 0, static_cast<int>(vars.size()) - 1))];
    if (v.numeric == numeric) return v;
  }
}

inline Term rand_numeric_term(Rng& rng, int depth) {
  if (depth <= 0 || irand(rng, 0, 2) == 0) {
    if (irand(rng, 0, 1) == 0) {
      const auto& v = pick_var(rng, true);
      return term_var(v.device, v.capability);
    }
    const auto& v = pick_var(rng, true);
    return term_const(pick(rng, v.pool));
  }
  const ArithOp op = static_cast<ArithOp>(irand(rng, 0, 2));
  return term_fn(op, rand_numeric_term(rng, depth - 1), rand_numeric_term(rng, depth - 1));
}

inline Predicate rand_relational(Rng& rng, int depth) {
  switch (irand(rng, 0, 3)) {
    case 0: {  // numeric, any comparison
      const RelOp op = static_cast<RelOp>(irand(rng, 0, 5));
      return pred_rel(rand_numeric_term(rng, depth - 1), op, rand_numeric_term(rng, depth - 1));
    }
    case 1: {  // string equality
      const auto& v = pick_var(rng, false);
      if (!std::holds_alternative<std::string>(v.pool.front()))
        return rand_relational(rng, depth);
      const RelOp op = irand(rng, 0, 1) == 0 ? RelOp::Eq : RelOp::Ne;
      return pred_rel(term_var(v.device, v.capability), op, term_const(pick(rng, v.pool)));
    }
    case 2: {  // boolean equality
      const RelOp op = irand(rng, 0, 1) == 0 ? RelOp::Eq : RelOp::Ne;
      return pred_rel(term_var("Door", "locked"), op, term_const(Value{irand(rng, 0, 1) == 0}));
    }
    default: {  // variable against variable, numeric
      const auto& a = pick_var(rng, true);
      const auto& b = pick_var(rng, true);
      const RelOp op = static_cast<RelOp>(irand(rng, 0, 5));
      return pred_rel(term_var(a.device, a.capability), op, term_var(b.device, b.capability));
    }
  }
}

inline Predicate rand_pred(Rng& rng, int depth) {
  if (depth <= 0) return rand_relational(rng, 1);
  switch (irand(rng, 0, 9)) {
    case 0: return pred_true();
    case 1:
    case 2: return pred_and(rand_pred(rng, depth - 1), rand_pred(rng, depth - 1));
    case 3:
    case 4: return pred_not(rand_pred(rng, depth - 1));
    default: return rand_relational(rng, depth);
  }
}

inline ThenCondition rand_then(Rng& rng, int depth) {
  if (depth <= 0) return then_pred(rand_pred(rng, 0));
  switch (irand(rng, 0, 5)) {
    case 0:
    case 1: return then_yesterday(rand_then(rng, depth - 1));
    case 2:
    case 3: return then_since(rand_then(rng, depth - 1), rand_then(rng, depth - 1));
    default: return then_pred(rand_pred(rng, depth));
  }
}

inline Invariant rand_invariant(Rng& rng, int depth) {
  return Invariant{rand_pred(rng, depth - 1), rand_then(rng, depth)};
}

inline Snapshot rand_snapshot(Rng& rng) {
  Snapshot s;
  for (const auto& v : universe()) s[v.device + "." + v.capability] = pick(rng, v.pool);
  return s;
}

/// Random trace: usually one variable changes per step, occasionally the
/// whole state is redrawn.
inline std::vector<Snapshot> rand_trace(Rng& rng, std::size_t len) {
  std::vector<Snapshot> out;
  if (len == 0) return out;
  out.push_back(rand_snapshot(rng));
  while (out.size() < len) {
    if (irand(rng, 0, 4) == 0) {
      out.push_back(rand_snapshot(rng));
    } else {
      Snapshot s = out.back();
      const auto& v = universe()[static_cast<std::size_t>(
          irand(rng, 0, static_cast<int>(universe().size()) - 1))];
      s[v.device + "." + v.capability] = pick(rng, v.pool);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace warden::testgen
