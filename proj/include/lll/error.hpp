#pragma once

#include <stdexcept>
#include <string>

namespace lll {

enum class ErrorKind {
  invalid_input,
  invalid_parameter,
  missing_variable,
  depth_exceeded,
  cap_exceeded,
  budget_exceeded,
  hypothesis_violated,
  precondition_violated,
  non_independent,
  script_inconsistent,
  unsatisfiable,
  internal_invariant,
  infeasible,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lll
