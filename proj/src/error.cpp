#include "lll/error.hpp"

namespace lll {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::missing_variable: return "missing-variable";
    case ErrorKind::depth_exceeded: return "depth-exceeded";
    case ErrorKind::cap_exceeded: return "cap-exceeded";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::hypothesis_violated: return "hypothesis-violated";
    case ErrorKind::precondition_violated: return "precondition-violated";
    case ErrorKind::non_independent: return "non-independent-step";
    case ErrorKind::script_inconsistent: return "script-inconsistent";
    case ErrorKind::unsatisfiable: return "unsatisfiable";
    case ErrorKind::internal_invariant: return "internal-invariant";
    case ErrorKind::infeasible: return "infeasible-at-desk-scale";
  }
  return "unknown";
}

}  // namespace lll
