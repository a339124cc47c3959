#pragma once

#include <stdexcept>
#include <string>

namespace premlog {

// Runtime failure categories for library operations. Parse-time problems are
// reported as Diagnostic lists instead (see diagnostics.hpp); Error is thrown
// for misuse of runtime operations and data-dependent failures.
enum class ErrorCode {
  overflow,              // exact rational left the 64-bit num/den range
  division_by_zero,      // runtime divisor evaluated to zero
  sort_mismatch,         // symbol used where a number is required (or vice versa)
  arity_mismatch,        // tuple/relation arity disagrees with expectation
  invalid_argument,      // bad parameters to a library call
  unresolved_constraint, // extrema literal could not be bound to a target atom
  rewrite_inapplicable,  // requested rewrite's preconditions do not hold
  iteration_cap,         // evaluation exceeded max_iterations where disallowed
  io_error,              // file could not be opened or read
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::division_by_zero: return "division-by-zero";
    case ErrorCode::sort_mismatch: return "sort-mismatch";
    case ErrorCode::arity_mismatch: return "arity-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::unresolved_constraint: return "unresolved-constraint";
    case ErrorCode::rewrite_inapplicable: return "rewrite-inapplicable";
    case ErrorCode::iteration_cap: return "iteration-cap";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace premlog
