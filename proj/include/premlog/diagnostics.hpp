#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace premlog {

// Half-open byte range plus the 1-based line/column of its start.
// A default-constructed span means "no source location" (synthesized nodes).
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool known() const { return line != 0; }
};

enum class DiagCode {
  lexical_error,
  syntax_error,
  arity_mismatch,
  unsafe_rule,
  invalid_extrema,
  division_by_zero,
  csv_error,
  unstratifiable_negation,
  unpushed_extrema_in_recursion,
};

inline const char* diag_code_name(DiagCode c) {
  switch (c) {
    case DiagCode::lexical_error: return "lexical-error";
    case DiagCode::syntax_error: return "syntax-error";
    case DiagCode::arity_mismatch: return "arity-mismatch";
    case DiagCode::unsafe_rule: return "unsafe-rule";
    case DiagCode::invalid_extrema: return "invalid-extrema";
    case DiagCode::division_by_zero: return "division-by-zero";
    case DiagCode::csv_error: return "csv-error";
    case DiagCode::unstratifiable_negation: return "unstratifiable-negation";
    case DiagCode::unpushed_extrema_in_recursion: return "unpushed-extrema-in-recursion";
  }
  return "unknown";
}

struct Diagnostic {
  DiagCode code;
  std::string message;
  SourceSpan span;

  std::string render() const {
    std::string out;
    if (span.known()) {
      out += std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
    }
    out += diag_code_name(code);
    out += ": ";
    out += message;
    return out;
  }
};

inline std::string render_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const Diagnostic& d : diags) {
    out += d.render();
    out += '\n';
  }
  return out;
}

}  // namespace premlog
