#include "janus/error.hpp"

namespace janus {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::EmptyInterface: return "EmptyInterface";
    case ErrorCode::NotDeltaConnected: return "NotDeltaConnected";
    case ErrorCode::HorizonTooSmall: return "HorizonTooSmall";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IncompatibleSource: return "IncompatibleSource";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegenerateNullSpace: return "DegenerateNullSpace";
    case ErrorCode::EmptyBranch: return "EmptyBranch";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::HorizonViolation: return "HorizonViolation";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace janus
