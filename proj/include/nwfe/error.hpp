#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nwfe {

enum class ErrorKind {
  // dataset-core
  EmptyFile,
  MissingLabelColumn,
  NonNumericFeature,
  RaggedRow,
  Io,
  // synth-gen
  InvalidSigma,
  // nwfe-batch
  EmptyTargetClass,
  FewerThanTwoClasses,
  SingletonClass,
  ZeroDiagonal,
  // subspace
  NotPositiveDefinite,
  DimensionMismatch,
  // evaluation
  ClassMissingFromFold,
  // shared
  InvalidArgument,
  InvalidSnapshot,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `kind()` identifies the contract that
/// was violated; the message carries row/column/class detail for users.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nwfe
