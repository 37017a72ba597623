#include "shellhier/errors.hpp"

namespace shellhier {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadDescriptor: return "BadDescriptor";
    case ErrorCode::DegenerateChart: return "DegenerateChart";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::InconclusiveFit: return "InconclusiveFit";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NotAnIsometry: return "NotAnIsometry";
    case ErrorCode::NotAPlate: return "NotAPlate";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::TubularViolation: return "TubularViolation";
    case ErrorCode::InsufficientOrder: return "InsufficientOrder";
    case ErrorCode::NegativeAlpha: return "NegativeAlpha";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_solver_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFailure:
    case ErrorCode::NewtonDiverged:
    case ErrorCode::InconclusiveFit:
    case ErrorCode::FitDegenerate:
    case ErrorCode::DegenerateImage:
      return true;
    default:
      return false;
  }
}

}  // namespace shellhier
