#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace apd {

enum class ErrorCode {
  DuplicatePartner,
  CapacityExceeded,
  DemandReused,
  UnknownAgent,
  InvalidEdge,
  ModeMismatch,
  PopulationMismatch,
  MissingOutcome,
  OutcomeOutOfRange,
  DegreeViolation,
  InvalidP,
  InvalidK,
  InvalidAlpha,
  IndexOutOfRange,
  ShapeMismatch,
  InfeasibleAssignment,
  UnbalancedVertex,
  TooLarge,
  TooFewSamples,
  Parse,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace apd
