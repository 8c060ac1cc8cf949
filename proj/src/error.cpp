#include "cfx/error.hpp"

namespace cfx {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::AllMissing: return "AllMissing";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::RowOutOfRange: return "RowOutOfRange";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::BadConstraint: return "BadConstraint";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::OutcomeConstraint: return "OutcomeConstraint";
    case ErrorCode::NoUsableFeatures: return "NoUsableFeatures";
    case ErrorCode::EmptyIncluded: return "EmptyIncluded";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotADistribution: return "NotADistribution";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NotInStack: return "NotInStack";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::MalformedRequest: return "MalformedRequest";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedCsv:
    case ErrorCode::BadConstraint:
    case ErrorCode::RowOutOfRange:
    case ErrorCode::MalformedRequest:
    case ErrorCode::InvalidConfig:
      return ErrorKind::Input;
    case ErrorCode::UnknownColumn:
    case ErrorCode::UnknownDataset:
    case ErrorCode::UnknownSession:
      return ErrorKind::NotFound;
    default:
      return ErrorKind::Domain;
  }
}

}  // namespace cfx
