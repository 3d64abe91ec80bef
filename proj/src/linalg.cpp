#include "mcgi/linalg.hpp"

#include "mcgi/error.hpp"

namespace mcgi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::MissingPi: return "MissingPi";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::Condition1Failed: return "Condition1Failed";
    case ErrorCode::DegenerateAlpha: return "DegenerateAlpha";
    case ErrorCode::DegeneratePivot: return "DegeneratePivot";
    case ErrorCode::InvarianceViolated: return "InvarianceViolated";
    case ErrorCode::ZeroProjection: return "ZeroProjection";
    case ErrorCode::NoValidRow: return "NoValidRow";
    case ErrorCode::Gamma2Inverse: return "Gamma2Inverse";
    case ErrorCode::Not15Inverse: return "Not15Inverse";
    case ErrorCode::Not14Inverse: return "Not14Inverse";
    case ErrorCode::NoRecipeVectors: return "NoRecipeVectors";
    case ErrorCode::RowSumNotConstant: return "RowSumNotConstant";
    case ErrorCode::PeriodicChain: return "PeriodicChain";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TrajectoryCapExceeded: return "TrajectoryCapExceeded";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::InvalidStationary: return "InvalidStationary";
    case ErrorCode::RouteDisagreement: return "RouteDisagreement";
    case ErrorCode::ResidualCheckFailed: return "ResidualCheckFailed";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NonFinite:
    case ErrorCode::ParseError:
    case ErrorCode::NotStochastic:
    case ErrorCode::NotIrreducible:
    case ErrorCode::MissingPi:
    case ErrorCode::IndexOutOfRange:
      return true;
    default:
      return false;
  }
}

}  // namespace mcgi
