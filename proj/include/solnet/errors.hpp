#pragma once

#include <stdexcept>
#include <string>

namespace solnet {

enum class ErrorKind {
  invalid_map,
  domain,
  precondition,
  integration_failure,
  resolution,
  out_of_range,
  truncation,
  numeric,
  unsupported_order,
  smoothness,
  consistency,
  input,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_map: return "invalid_map";
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::integration_failure: return "integration_failure";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::unsupported_order: return "unsupported_order";
    case ErrorKind::smoothness: return "smoothness";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::input: return "input";
  }
  return "unknown";
}

/// Single exception type; `kind()` tells callers (and the CLI) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

  /// Input-side problems map to CLI exit code 2, everything else to 3.
  bool is_input_error() const noexcept {
    return kind_ == ErrorKind::input || kind_ == ErrorKind::domain ||
           kind_ == ErrorKind::precondition || kind_ == ErrorKind::invalid_map ||
           kind_ == ErrorKind::out_of_range || kind_ == ErrorKind::unsupported_order;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace solnet
