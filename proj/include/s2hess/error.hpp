#pragma once

#include <stdexcept>
#include <string>

namespace s2hess {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  unsupported_order,
  wrong_ambient,
  under_resolved_mollifier,
  invalid_exponent,
  support_violation,
  empty_battery,
  dimension_unsupported,
  undefined_ratio,
  too_far_from_identity,
  diagonalization_failed,
  hypothesis_violation,
  schedule_infeasible,
  overflow,
  io,
  parse,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace s2hess
