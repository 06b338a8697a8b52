// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <variant>

namespace warden {

/// A typed device/state value: boolean, 64-bit integer, 64-bit float, or
/// string. Enumerated device states (e.g. "locked") are strings whose
/// admissible set is declared by the device registry.
using Value = std::variant<bool, std::int64_t, double, std::string>;

inline bool is_bool(const Value& v) { return std::holds_alternative<bool>(v); }
inline bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }
inline bool is_real(const Value& v) { return std::holds_alternative<double>(v); }
inline bool is_string(const Value& v) { return std::holds_alternative<std::string>(v); }
inline bool is_numeric(const Value& v) { return is_int(v) || is_real(v); }

inline double as_double(const Value& v) {
  if (is_int(v)) return static_cast<double>(std::get<std::int64_t>(v));
  if (is_real(v)) return std::get<double>(v);
  throw std::logic_error("value is not numeric");
}

/// Equality with int/real promotion; cross-kind comparisons other than
/// int-vs-real are unequal rather than errors.
inline bool value_equal(const Value& a, const Value& b) {
  if (a.index() == b.index()) return a == b;
  if (is_numeric(a) && is_numeric(b)) return as_double(a) == as_double(b);
  return false;
}

inline const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "real";
    default: return "string";
  }
}

inline std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

/// Canonical literal form, re-parseable by the policy DSL. Reals always
/// carry a '.' or exponent so the literal keeps its type on a round trip.
inline std::string to_literal(const Value& v) {
  switch (v.index()) {
    case 0: return std::get<bool>(v) ? "true" : "false";
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
      std::string s = buf;
      if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
      return s;
    }
    default: return quote_string(std::get<std::string>(v));
  }
}

/// Plain text form used on the wire (MQTT payloads): like to_literal but
/// strings are unquoted.
inline std::string to_payload(const Value& v) {
  if (is_string(v)) return std::get<std::string>(v);
  return to_literal(v);
}

}  // namespace warden
