#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace janus {

enum class ErrorCode {
  EmptyRegion,
  OverlapError,
  EmptyInterface,
  NotDeltaConnected,
  HorizonTooSmall,
  InvalidOrder,
  DimensionMismatch,
  IncompatibleSource,
  NoConvergence,
  UnknownModel,
  TooLarge,
  DegenerateNullSpace,
  EmptyBranch,
  EmptySubset,
  HorizonViolation,
  NegativeRate,
  ParseError,
  ValidationError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-status mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace janus
