#include "agsynth/error.hpp"

namespace agsynth {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDecode: return "DecodeError";
    case ErrorCode::kInvalidDimension: return "InvalidDimension";
    case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kInvalidJob: return "InvalidJob";
    case ErrorCode::kInvalidSourceImage: return "InvalidSourceImage";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kAuth: return "AuthError";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownItem: return "UnknownItem";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kDuplicateRating: return "DuplicateRating";
    case ErrorCode::kCancelled: return "Cancelled";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace agsynth
