#pragma once

#include <stdexcept>
#include <string>

namespace solitonlab {

// Invalid user input is reported with std::invalid_argument. Everything a
// computation can fail at after its inputs were accepted goes through
// NumericError, tagged with the failure kind.
enum class ErrorKind {
  no_convergence,
  numeric_failure,
  not_invertible,
  singular_solve,
  invalid_bracket,
  bracket_too_small,
  tail_window_too_small,
  not_a_zero_mode,
  on_diagonal_singularity,
};

const char* to_string(ErrorKind kind);

class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::not_invertible: return "not-invertible";
    case ErrorKind::singular_solve: return "singular-solve";
    case ErrorKind::invalid_bracket: return "invalid-bracket";
    case ErrorKind::bracket_too_small: return "bracket-too-small";
    case ErrorKind::tail_window_too_small: return "tail-window-too-small";
    case ErrorKind::not_a_zero_mode: return "not-a-zero-mode";
    case ErrorKind::on_diagonal_singularity: return "on-diagonal-singularity";
  }
  return "unknown";
}

}  // namespace solitonlab
