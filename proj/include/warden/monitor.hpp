// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "warden/ast.hpp"
#include "warden/snapshot.hpp"

namespace warden {

/// Incremental evaluator for one invariant over a growing trace.
///
/// The formula is flattened into a post-order table of subformulas; each
/// step keeps two bits per subformula (value at the previous and at the
/// current position), so memory is constant in the trace length:
///
///   yesterday f   at i  =  i > 0  and  f at i-1
///   f since g     at i  =  g at i  or  (f at i  and  i > 0  and  (f since g) at i-1)
///
/// step() commits a trace position; peek() evaluates a hypothetical next
/// position against the same history without committing, which is how
/// commands are checked before they are allowed through.
class Monitor {
 public:
  explicit Monitor(Invariant inv)
      : inv_(std::make_shared<const Invariant>(std::move(inv))) {
    const int i_if = add_pred(inv_->if_cond);
    const int i_then = add_then(inv_->then_cond);
    nodes_.push_back(Node{SubKind::Implies, i_if, i_then, nullptr});
    prev_.assign(nodes_.size(), false);
  }

  /// Append one observed position to the trace; returns the verdict there.
  bool step(const StateSnapshot& snap) {
    std::vector<bool> curr(nodes_.size(), false);
    compute(snap, curr);
    prev_.swap(curr);
    ++pos_;
    return prev_.back();
  }

  /// Verdict for a hypothetical next position; history is left untouched.
  bool peek(const StateSnapshot& snap) const {
    std::vector<bool> curr(nodes_.size(), false);
    compute(snap, curr);
    return curr.back();
  }

  /// Verdict at the most recent committed position.
  bool verdict() const {
    if (pos_ == 0) throw std::logic_error("monitor has not observed any position");
    return prev_.back();
  }

  std::uint64_t position() const { return pos_; }
  std::size_t subformula_count() const { return nodes_.size(); }
  const Invariant& invariant() const { return *inv_; }

  void reset() {
    prev_.assign(nodes_.size(), false);
    pos_ = 0;
  }

  /// The complete inter-step memory: one bit per subformula plus the
  /// position counter. Restoring these reproduces future verdicts exactly;
  /// the state-space analyzer uses this to explore monitor states.
  const std::vector<bool>& memory() const { return prev_; }

  void restore(std::vector<bool> memory, std::uint64_t position) {
    if (memory.size() != nodes_.size())
      throw std::logic_error("monitor memory size mismatch");
    prev_ = std::move(memory);
    pos_ = position;
  }

 private:
  enum class SubKind { True, Rel, And, Not, Yesterday, Since, Implies };

  struct Node {
    SubKind kind;
    int a;  // child indices in post-order; children precede parents
    int b;
    const Relational* rel;
  };

  int add_pred(const Predicate& p) {
    if (std::holds_alternative<PredTrue>(p.node)) {
      nodes_.push_back(Node{SubKind::True, -1, -1, nullptr});
    } else if (const auto* r = std::get_if<Relational>(&p.node)) {
      nodes_.push_back(Node{SubKind::Rel, -1, -1, r});
    } else if (const auto* a = std::get_if<PredAnd>(&p.node)) {
      const int l = add_pred(*a->left);
      const int rr = add_pred(*a->right);
      nodes_.push_back(Node{SubKind::And, l, rr, nullptr});
    } else {
      const int c = add_pred(*std::get<PredNot>(p.node).arg);
      nodes_.push_back(Node{SubKind::Not, c, -1, nullptr});
    }
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_then(const ThenCondition& t) {
    if (const auto* p = std::get_if<Predicate>(&t.node)) return add_pred(*p);
    if (const auto* y = std::get_if<Yesterday>(&t.node)) {
      const int c = add_then(*y->arg);
      nodes_.push_back(Node{SubKind::Yesterday, c, -1, nullptr});
      return static_cast<int>(nodes_.size()) - 1;
    }
    const auto& s = std::get<Since>(t.node);
    const int l = add_then(*s.left);
    const int r = add_then(*s.right);
    nodes_.push_back(Node{SubKind::Since, l, r, nullptr});
    return static_cast<int>(nodes_.size()) - 1;
  }

  void compute(const StateSnapshot& snap, std::vector<bool>& curr) const {
    const bool has_prev = pos_ > 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      switch (n.kind) {
        case SubKind::True: curr[i] = true; break;
        case SubKind::Rel: curr[i] = eval_relational(*n.rel, snap); break;
        case SubKind::And: curr[i] = curr[n.a] && curr[n.b]; break;
        case SubKind::Not: curr[i] = !curr[n.a]; break;
        case SubKind::Yesterday: curr[i] = has_prev && prev_[n.a]; break;
        case SubKind::Since:
          curr[i] = curr[n.b] || (curr[n.a] && has_prev && prev_[i]);
          break;
        case SubKind::Implies: curr[i] = !curr[n.a] || curr[n.b]; break;
      }
    }
  }

  std::shared_ptr<const Invariant> inv_;  // heap box: node pointers stay valid
  std::vector<Node> nodes_;               // post-order, root last
  std::vector<bool> prev_;
  std::uint64_t pos_ = 0;
};

/// Per-position verdicts of one invariant over a complete trace.
inline std::vector<bool> monitor_trace(const Invariant& inv,
                                       const std::vector<StateSnapshot>& trace) {
  Monitor m(inv);
  std::vector<bool> out;
  out.reserve(trace.size());
  for (const auto& snap : trace) out.push_back(m.step(snap));
  return out;
}

/// True when the invariant holds at every position of the trace.
inline bool holds_throughout(const Invariant& inv, const std::vector<StateSnapshot>& trace) {
  Monitor m(inv);
  for (const auto& snap : trace)
    if (!m.step(snap)) return false;
  return true;
}

}  // namespace warden
