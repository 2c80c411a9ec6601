#pragma once

#include <stdexcept>
#include <string>

namespace mtmusic {

enum class ErrorKind {
  InvalidArgument,
  NotHermitian,
  NoConvergence,
  NotPositiveDefinite,
  InvalidShape,
  DegenerateWeights,
  NonFiniteIterate,
  TauTooSmall,
  SingularIterate,
  TooFewPeaks,
  BadSubarraySize,
  CardinalityMismatch,
  NonPositiveEigenvalue,
  UnsortedEigenvalues,
  SchemaError,
  UnknownEstimator,
  UnknownPreset,
  EmptyReport,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the bench harness in particular) can react without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mtmusic
