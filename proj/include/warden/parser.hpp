// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "warden/ast.hpp"
#include "warden/value.hpp"

namespace warden {

/// Raised for malformed policy text. Carries the source position so callers
/// can point at the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg, std::size_t tok_index = 0)
      : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                           ": " + msg),
        line_(line),
        col_(col),
        tok_index_(tok_index) {}

  int line() const { return line_; }
  int col() const { return col_; }
  std::size_t tok_index() const { return tok_index_; }

 private:
  int line_;
  int col_;
  std::size_t tok_index_;
};

namespace detail {

enum class TokKind {
  End,
  Ident,    // bare identifier (device, capability, command, rule name)
  IntLit,
  RealLit,
  StringLit,
  BoolLit,
  LParen,
  RParen,
  Dot,
  Semi,
  Assign,   // '=' inside send(...)
  Plus,
  Minus,
  Star,     // multiplication, or the command wildcard in drop(...)
  RelEq,
  RelNe,
  RelLt,
  RelLe,
  RelGt,
  RelGe,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;   // identifier / keyword spelling
  Value literal;      // for IntLit / RealLit / StringLit / BoolLit
  int line = 1;
  int col = 1;
};

inline bool is_reserved_word(const std::string& s) {
  return s == "RULE" || s == "IF" || s == "THEN" || s == "CORRECT" || s == "and" ||
         s == "not" || s == "true" || s == "false" || s == "since" || s == "yesterday" ||
         s == "drop" || s == "send";
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (at_end()) {
        out.push_back(t);
        return out;
      }
      const char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.text = lex_word();
        if (t.text == "true" || t.text == "false") {
          t.kind = TokKind::BoolLit;
          t.literal = Value{t.text == "true"};
        } else {
          t.kind = TokKind::Ident;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(t);
      } else if (c == '"') {
        t.kind = TokKind::StringLit;
        t.literal = Value{lex_string()};
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string lex_word() {
    std::string w;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
      w += advance();
    return w;
  }

  void lex_number(Token& t) {
    std::string num;
    bool real = false;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      real = true;
      num += advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      real = true;
      num += advance();
      if (peek() == '+' || peek() == '-') num += advance();
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError(t.line, t.col, "malformed exponent in numeric literal");
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
    }
    if (real) {
      t.kind = TokKind::RealLit;
      t.literal = Value{std::stod(num)};
    } else {
      t.kind = TokKind::IntLit;
      try {
        t.literal = Value{static_cast<std::int64_t>(std::stoll(num))};
      } catch (const std::out_of_range&) {
        throw ParseError(t.line, t.col, "integer literal out of range");
      }
    }
  }

  std::string lex_string() {
    const int line = line_, col = col_;
    advance();  // opening quote
    std::string s;
    while (true) {
      if (at_end() || peek() == '\n')
        throw ParseError(line, col, "unterminated string literal");
      char c = advance();
      if (c == '"') return s;
      if (c == '\\') {
        if (at_end()) throw ParseError(line, col, "unterminated string literal");
        const char e = advance();
        switch (e) {
          case '"': s += '"'; break;
          case '\\': s += '\\'; break;
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          default:
            throw ParseError(line_, col_ - 2, std::string("unknown escape '\\") + e + "'");
        }
      } else {
        s += c;
      }
    }
  }

  void lex_punct(Token& t) {
    const char c = advance();
    switch (c) {
      case '(': t.kind = TokKind::LParen; return;
      case ')': t.kind = TokKind::RParen; return;
      case '.': t.kind = TokKind::Dot; return;
      case ';': t.kind = TokKind::Semi; return;
      case '+': t.kind = TokKind::Plus; return;
      case '-': t.kind = TokKind::Minus; return;
      case '*': t.kind = TokKind::Star; return;
      case '=':
        if (peek() == '=') {
          advance();
          t.kind = TokKind::RelEq;
        } else {
          t.kind = TokKind::Assign;
        }
        return;
      case '!':
        if (peek() == '=') {
          advance();
          t.kind = TokKind::RelNe;
          return;
        }
        throw ParseError(t.line, t.col, "expected '!=' after '!'");
      case '<':
        if (peek() == '=') {
          advance();
          t.kind = TokKind::RelLe;
        } else {
          t.kind = TokKind::RelLt;
        }
        return;
      case '>':
        if (peek() == '=') {
          advance();
          t.kind = TokKind::RelGe;
        } else {
          t.kind = TokKind::RelGt;
        }
        return;
      default:
        throw ParseError(t.line, t.col, std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline bool is_rel(TokKind k) {
  return k == TokKind::RelEq || k == TokKind::RelNe || k == TokKind::RelLt ||
         k == TokKind::RelLe || k == TokKind::RelGt || k == TokKind::RelGe;
}

inline RelOp rel_of(TokKind k) {
  switch (k) {
    case TokKind::RelEq: return RelOp::Eq;
    case TokKind::RelNe: return RelOp::Ne;
    case TokKind::RelLt: return RelOp::Lt;
    case TokKind::RelLe: return RelOp::Le;
    case TokKind::RelGt: return RelOp::Gt;
    default: return RelOp::Ge;
  }
}

// Recursive-descent parser over the token stream. Temporal operators are
// only admitted in then-conditions; 'and' / 'not' never apply to temporal
// subformulas. A leading '(' in atom position is ambiguous between a formula
// group and a parenthesized arithmetic term, so the parser first tries the
// group reading and backtracks to a relational on failure.
class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Policy policy() {
    Policy p;
    while (!at(TokKind::End)) p.rules.push_back(rule());
    return p;
  }

  Invariant invariant() {
    Invariant inv = invariant_body();
    expect_end();
    return inv;
  }

  ThenCondition then_condition() {
    ThenCondition t = then_expr();
    expect_end();
    return t;
  }

  Predicate predicate() {
    ThenCondition t = then_expr();
    expect_end();
    if (then_is_temporal(t)) throw temporal_error();
    return std::get<Predicate>(std::move(t.node));
  }

 private:
  // ---- token plumbing -----------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& next() const { return toks_[pos_ + 1 < toks_.size() ? pos_ + 1 : pos_]; }
  bool at(TokKind k) const { return cur().kind == k; }
  bool at_kw(const char* w) const { return at(TokKind::Ident) && cur().text == w; }
  void bump() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool eat(TokKind k) {
    if (!at(k)) return false;
    bump();
    return true;
  }
  bool eat_kw(const char* w) {
    if (!at_kw(w)) return false;
    bump();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(cur().line, cur().col, msg, pos_);
  }

  ParseError temporal_error() const {
    const Token& t = toks_[last_temporal_];
    return ParseError(t.line, t.col,
                      "temporal operator '" + t.text + "' is only allowed in then-conditions",
                      last_temporal_);
  }

  void expect(TokKind k, const char* what) {
    if (!eat(k)) fail(std::string("expected ") + what);
  }

  void expect_end() {
    if (!at(TokKind::End)) fail("unexpected trailing input '" + describe(cur()) + "'");
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokKind::End: return "end of input";
      case TokKind::Ident: return t.text;
      case TokKind::StringLit: return quote_string(std::get<std::string>(t.literal));
      case TokKind::IntLit:
      case TokKind::RealLit:
      case TokKind::BoolLit: return to_literal(t.literal);
      case TokKind::LParen: return "(";
      case TokKind::RParen: return ")";
      case TokKind::Dot: return ".";
      case TokKind::Semi: return ";";
      case TokKind::Assign: return "=";
      case TokKind::Plus: return "+";
      case TokKind::Minus: return "-";
      case TokKind::Star: return "*";
      case TokKind::RelEq: return "==";
      case TokKind::RelNe: return "!=";
      case TokKind::RelLt: return "<";
      case TokKind::RelLe: return "<=";
      case TokKind::RelGt: return ">";
      default: return ">=";
    }
  }

  // ---- rules --------------------------------------------------------------

  PolicyRule rule() {
    PolicyRule r;
    if (eat_kw("RULE")) {
      if (!at(TokKind::Ident) || is_reserved_word(cur().text)) fail("expected rule name");
      r.name = cur().text;
      bump();
    }
    r.invariant = invariant_body();
    if (eat_kw("CORRECT")) {
      r.corrections.push_back(action());
      while (eat(TokKind::Semi)) {
        if (!at_kw("drop") && !at_kw("send")) break;  // trailing ';' before next rule / EOF
        r.corrections.push_back(action());
      }
    }
    return r;
  }

  Invariant invariant_body() {
    if (!eat_kw("IF")) fail("expected 'IF'");
    ThenCondition cond = then_expr();
    if (then_is_temporal(cond)) throw temporal_error();
    if (!eat_kw("THEN")) fail("expected 'THEN'");
    Invariant inv;
    inv.if_cond = std::get<Predicate>(std::move(cond.node));
    inv.then_cond = then_expr();
    return inv;
  }

  CorrectiveAction action() {
    const bool is_drop = at_kw("drop");
    if (!is_drop && !at_kw("send")) fail("expected 'drop' or 'send'");
    bump();
    expect(TokKind::LParen, "'('");
    if (!at(TokKind::Ident) || is_reserved_word(cur().text)) fail("expected device name");
    std::string device = cur().text;
    bump();
    expect(TokKind::Dot, "'.'");
    std::string command;
    if (at(TokKind::Star)) {
      if (!is_drop) fail("'*' wildcard is only valid in drop(...)");
      command = "*";
      bump();
    } else if (at(TokKind::Ident) && !is_reserved_word(cur().text)) {
      command = cur().text;
      bump();
    } else {
      fail("expected command name");
    }
    if (is_drop) {
      expect(TokKind::RParen, "')'");
      return DropAction{std::move(device), std::move(command)};
    }
    SendAction s{std::move(device), std::move(command), std::nullopt};
    if (eat(TokKind::Assign)) s.value = literal_value();
    expect(TokKind::RParen, "')'");
    return s;
  }

  Value literal_value() {
    if (at(TokKind::Minus) &&
        (next().kind == TokKind::IntLit || next().kind == TokKind::RealLit)) {
      bump();
      Value v = cur().literal;
      bump();
      if (std::holds_alternative<std::int64_t>(v)) return Value{-std::get<std::int64_t>(v)};
      return Value{-std::get<double>(v)};
    }
    if (at(TokKind::IntLit) || at(TokKind::RealLit) || at(TokKind::StringLit) ||
        at(TokKind::BoolLit)) {
      Value v = cur().literal;
      bump();
      return v;
    }
    fail("expected literal value");
  }

  // ---- then-conditions ----------------------------------------------------

  ThenCondition then_expr() {
    ThenCondition l = then_unary();
    while (at_kw("since")) {
      last_temporal_ = pos_;
      bump();
      ThenCondition r = then_unary();
      l = then_since(std::move(l), std::move(r));
    }
    return l;
  }

  ThenCondition then_unary() {
    if (at_kw("yesterday")) {
      last_temporal_ = pos_;
      bump();
      return then_yesterday(then_unary());
    }
    return then_and_chain();
  }

  // A predicate 'and' chain; the first atom may turn out to be a temporal
  // group, in which case no chain is allowed.
  ThenCondition then_and_chain() {
    ThenCondition first = group_or_atom(/*allow_temporal=*/true);
    if (then_is_temporal(first)) {
      if (at_kw("and")) fail("'and' cannot be applied to a temporal formula");
      return first;
    }
    Predicate p = std::get<Predicate>(std::move(first.node));
    while (eat_kw("and")) p = pred_and(std::move(p), pred_operand());
    return then_pred(std::move(p));
  }

  // Argument of 'not' or right operand of 'and': a predicate atom.
  Predicate pred_operand() {
    ThenCondition t = group_or_atom(/*allow_temporal=*/false);
    return std::get<Predicate>(std::move(t.node));
  }

  ThenCondition group_or_atom(bool allow_temporal) {
    if (at(TokKind::LParen)) return paren_group(allow_temporal);
    return then_pred(pred_basic());
  }

  // '(' ... ')' is first parsed as a formula group; if that fails, or the
  // group is followed by an operator that only applies to terms, re-parse
  // from the '(' as the left term of a relational.
  ThenCondition paren_group(bool allow_temporal) {
    const std::size_t start = pos_;
    try {
      bump();  // '('
      ThenCondition inner = then_expr();
      expect(TokKind::RParen, "')'");
      if (is_rel(cur().kind) || at(TokKind::Plus) || at(TokKind::Minus) || at(TokKind::Star))
        fail("operator applied to a formula group");  // force the relational re-parse below
      if (then_is_temporal(inner) && !allow_temporal) throw temporal_error();
      return inner;
    } catch (const ParseError& group_err) {
      pos_ = start;
      try {
        return then_pred(relational());
      } catch (const ParseError& rel_err) {
        throw rel_err.tok_index() > group_err.tok_index() ? rel_err : group_err;
      }
    }
  }

  // Predicate atom that does not start with '('.
  Predicate pred_basic() {
    if (eat_kw("not")) return pred_not(pred_operand());
    if (at(TokKind::BoolLit) && std::get<bool>(cur().literal) && !starts_term_continuation())
      return (bump(), pred_true());
    return relational();
  }

  // After 'true', an operator means the token was a boolean literal term.
  bool starts_term_continuation() const {
    const TokKind k = next().kind;
    return is_rel(k) || k == TokKind::Plus || k == TokKind::Minus || k == TokKind::Star;
  }

  Predicate relational() {
    Term l = term_expr();
    if (!is_rel(cur().kind)) {
      if (at(TokKind::Assign)) fail("'=' is only used in send(...); use '==' to compare");
      fail("expected comparison operator");
    }
    const RelOp op = rel_of(cur().kind);
    bump();
    Term r = term_expr();
    return pred_rel(std::move(l), op, std::move(r));
  }

  // ---- terms --------------------------------------------------------------

  Term term_expr() {
    Term l = term_factor();
    while (at(TokKind::Plus) || at(TokKind::Minus)) {
      const ArithOp op = at(TokKind::Plus) ? ArithOp::Add : ArithOp::Sub;
      bump();
      l = term_fn(op, std::move(l), term_factor());
    }
    return l;
  }

  Term term_factor() {
    Term l = term_primary();
    while (eat(TokKind::Star)) l = term_fn(ArithOp::Mul, std::move(l), term_primary());
    return l;
  }

  Term term_primary() {
    if (eat(TokKind::LParen)) {
      Term t = term_expr();
      expect(TokKind::RParen, "')'");
      return t;
    }
    if (at(TokKind::Minus) &&
        (next().kind == TokKind::IntLit || next().kind == TokKind::RealLit)) {
      return term_const(literal_value());
    }
    if (at(TokKind::IntLit) || at(TokKind::RealLit) || at(TokKind::StringLit) ||
        at(TokKind::BoolLit)) {
      Value v = cur().literal;
      bump();
      return term_const(std::move(v));
    }
    if (at(TokKind::Ident)) {
      if (is_reserved_word(cur().text))
        fail("unexpected keyword '" + cur().text + "' in expression");
      std::string device = cur().text;
      bump();
      expect(TokKind::Dot, "'.' (variables are written device.capability)");
      if (!at(TokKind::Ident) || is_reserved_word(cur().text)) fail("expected capability name");
      std::string cap = cur().text;
      bump();
      return term_var(std::move(device), std::move(cap));
    }
    fail("expected a value, variable, or '('");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t last_temporal_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

inline Policy parse_policy(const std::string& text) {
  return detail::Parser(detail::Lexer(text).run()).policy();
}

inline Invariant parse_invariant(const std::string& text) {
  return detail::Parser(detail::Lexer(text).run()).invariant();
}

inline ThenCondition parse_then_condition(const std::string& text) {
  return detail::Parser(detail::Lexer(text).run()).then_condition();
}

inline Predicate parse_predicate(const std::string& text) {
  return detail::Parser(detail::Lexer(text).run()).predicate();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Policy load_policy_file(const std::string& path) {
  try {
    return parse_policy(read_text_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace warden
