#pragma once

#include <stdexcept>
#include <string>

namespace tfcl {

/// Coarse error categories. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  invalid_argument,  // bad parameter to a library call
  config,            // run config / spec document rejected
  io,                // filesystem failure
  format,            // FEB or bank file malformed
  validation,        // data violates a domain invariant
  schedule,          // schedule construction or label/schedule mismatch
  internal,          // an audit inside the pipeline tripped
};

constexpr const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::validation: return "validation";
    case ErrorKind::schedule: return "schedule";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tfcl
