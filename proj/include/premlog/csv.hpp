#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "premlog/diagnostics.hpp"
#include "premlog/value.hpp"

namespace premlog {

struct CsvResult {
  std::optional<Relation> relation;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return relation.has_value() && diagnostics.empty(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline bool numeric_shaped(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
    ++i;
    ++digits;
  }
  if (digits == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '.' && s[i] != '/') return false;
  ++i;
  std::size_t tail = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
    ++i;
    ++tail;
  }
  return tail > 0 && i == s.size();
}

}  // namespace detail

// Parses comma-separated rows into a relation of the given arity. Fields are
// trimmed; numeric-shaped fields (integers, decimals, p/q fractions) become
// exact rationals, everything else a symbol. No quoting: fields cannot
// contain commas or newlines. Duplicate rows collapse (set semantics).
inline CsvResult load_facts(const std::string& pred, std::size_t arity, std::string_view rows) {
  CsvResult result;
  Relation rel(arity);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= rows.size()) {
    std::size_t eol = rows.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? rows.substr(pos) : rows.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? rows.size() + 1 : eol + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t fpos = 0;
    while (true) {
      std::size_t comma = line.find(',', fpos);
      fields.push_back(detail::trim(
          comma == std::string_view::npos ? line.substr(fpos) : line.substr(fpos, comma - fpos)));
      if (comma == std::string_view::npos) break;
      fpos = comma + 1;
    }
    SourceSpan span;
    span.line = static_cast<std::uint32_t>(line_no);
    span.column = 1;
    if (fields.size() != arity) {
      result.diagnostics.push_back(
          {DiagCode::csv_error,
           pred + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
               " fields, expected " + std::to_string(arity),
           span});
      continue;
    }
    Tuple t;
    t.reserve(arity);
    bool bad = false;
    for (std::string_view f : fields) {
      if (f.empty()) {
        result.diagnostics.push_back(
            {DiagCode::csv_error, pred + ": row " + std::to_string(line_no) + " has an empty field",
             span});
        bad = true;
        break;
      }
      if (detail::numeric_shaped(f)) {
        try {
          t.push_back(Value::number(Rational::parse(f)));
        } catch (const Error& e) {
          result.diagnostics.push_back(
              {DiagCode::csv_error,
               pred + ": row " + std::to_string(line_no) + ": " + e.what(), span});
          bad = true;
          break;
        }
      } else {
        t.push_back(Value::symbol(f));
      }
    }
    if (!bad) rel.insert(std::move(t));
  }
  if (result.diagnostics.empty()) result.relation = std::move(rel);
  return result;
}

}  // namespace premlog
