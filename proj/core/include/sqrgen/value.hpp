#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <variant>

namespace sqrgen {

/// A database cell value. monostate encodes SQL NULL.
using Value = std::variant<std::monostate, int64_t, double, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Shortest round-trip decimal text for a double.
inline std::string double_to_text(double d) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, end);
}

/// Plain text form, as it appears in questions and filter phrases.
inline std::string value_to_text(const Value& v) {
  switch (v.index()) {
    case 0: return "null";
    case 1: return std::to_string(std::get<int64_t>(v));
    case 2: return double_to_text(std::get<double>(v));
    default: return std::get<std::string>(v);
  }
}

/// SQL literal form: strings single-quoted with quote doubling, numbers bare.
inline std::string value_to_sql(const Value& v) {
  if (is_null(v)) return "NULL";
  if (std::holds_alternative<std::string>(v)) {
    std::string out = "'";
    for (char c : std::get<std::string>(v)) {
      out += c;
      if (c == '\'') out += '\'';
    }
    out += '\'';
    return out;
  }
  return value_to_text(v);
}

}  // namespace sqrgen
