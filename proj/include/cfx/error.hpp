#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfx {

enum class ErrorCode {
  // dataset
  MalformedCsv,
  EmptyDataset,
  AllMissing,
  UnknownColumn,
  EmptySubset,
  RowOutOfRange,
  TypeMismatch,
  // filters
  BadConstraint,
  InvalidRange,
  UnknownCategory,
  OutcomeConstraint,
  // partition
  NoUsableFeatures,
  EmptyIncluded,
  EmptyComplement,
  InvalidConfig,
  // statistics
  NotADistribution,
  EmptySample,
  OutOfRange,
  TooFewRows,
  // session / service
  NotInStack,
  UnknownDataset,
  UnknownSession,
  MalformedRequest,
};

/// How an error surfaces at the process boundary: HTTP status and CLI exit code.
enum class ErrorKind {
  Input,     // 400 / exit 1
  NotFound,  // 404 / exit 1
  Domain,    // 422 / exit 2
};

std::string_view code_name(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace cfx
