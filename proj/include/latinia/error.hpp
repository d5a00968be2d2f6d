#pragma once

#include <stdexcept>
#include <string>

namespace latinia {

enum class Errc {
  non_convergence,
  singular_matrix,
  rank_deficient,
  dependent_input,
  zero_vector,
  budget_exceeded,
  invalid_triple,
  chain_structure_violation,
  out_of_range,
  invalid_argument,
  config,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::non_convergence: return "NonConvergence";
    case Errc::singular_matrix: return "SingularMatrix";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::dependent_input: return "DependentInput";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::invalid_triple: return "InvalidTriple";
    case Errc::chain_structure_violation: return "ChainStructureViolation";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::config: return "ConfigError";
  }
  return "Unknown";
}

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace latinia
