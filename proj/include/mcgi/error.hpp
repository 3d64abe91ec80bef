#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcgi {

enum class ErrorCode {
  // input / validation failures
  InvalidArgument,
  ShapeMismatch,
  NonFinite,
  ParseError,
  NotStochastic,
  NotIrreducible,
  MissingPi,
  IndexOutOfRange,
  // numerical failures
  SingularMatrix,
  Condition1Failed,
  DegenerateAlpha,
  DegeneratePivot,
  InvarianceViolated,
  ZeroProjection,
  NoValidRow,
  Gamma2Inverse,
  Not15Inverse,
  Not14Inverse,
  NoRecipeVectors,
  RowSumNotConstant,
  PeriodicChain,
  NoConvergence,
  TrajectoryCapExceeded,
  NegativeVariance,
  InvalidStationary,
  RouteDisagreement,
  ResidualCheckFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input rather than by a numerical breakdown.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcgi
