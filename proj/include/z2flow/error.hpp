#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace z2flow {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotHermitian,
  NotUnitary,
  NotAntiInvolution,
  OddDimension,
  ConvergenceFailure,
  AmbiguousKernel,
  NotTauInvariant,
  GridTooCoarse,
  DegenerateCrossing,
  OddKernelAtSymmetricPoint,
  AliasingDetected,
  SingularEndpoint,
  NoSpectralGap,
  ParseError,
  NotSelfAdjoint,
  NotTimeReversalSymmetric,
  OddInternalDimension,
  GapClosed,
  TruncationTooSmall,
  AmbiguousLocalization,
  RankDrop,
  TrackingLost,
};

std::string_view to_string(ErrorKind kind);

// Numerical refusals are the library declining to guess (grid, tolerance or
// gap problems); everything else is malformed input.
bool is_numerical_refusal(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace z2flow
