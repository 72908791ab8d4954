#include "nwfe/error.hpp"

namespace nwfe {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorKind::NonNumericFeature: return "NonNumericFeature";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::Io: return "Io";
    case ErrorKind::InvalidSigma: return "InvalidSigma";
    case ErrorKind::EmptyTargetClass: return "EmptyTargetClass";
    case ErrorKind::FewerThanTwoClasses: return "FewerThanTwoClasses";
    case ErrorKind::SingletonClass: return "SingletonClass";
    case ErrorKind::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ClassMissingFromFold: return "ClassMissingFromFold";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSnapshot: return "InvalidSnapshot";
  }
  return "Unknown";
}

}  // namespace nwfe
