#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shellhier {

enum class ErrorCode {
  BadDescriptor,
  DegenerateChart,
  OutOfDomain,
  DegenerateImage,
  OrderTooHigh,
  InconclusiveFit,
  SolverFailure,
  NotAnIsometry,
  NotAPlate,
  NotElliptic,
  TubularViolation,
  InsufficientOrder,
  NegativeAlpha,
  OutOfRegime,
  ConstraintViolated,
  NewtonDiverged,
  FitDegenerate,
  BadConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Solver-side failures (as opposed to rejected inputs).
bool is_solver_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shellhier
