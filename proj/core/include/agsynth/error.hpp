#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agsynth {

enum class ErrorCode {
  kIo,
  kDecode,
  kInvalidDimension,
  kValueOutOfRange,
  kDimensionMismatch,
  kInvalidConfig,
  kTooSmall,
  kInvalidJob,
  kInvalidSourceImage,
  kBackendUnavailable,
  kRateLimited,
  kAuth,
  kMissingGroundTruth,
  kEmptyInput,
  kEmptyPool,
  kUnknownSession,
  kUnknownItem,
  kScoreOutOfRange,
  kDuplicateRating,
  kCancelled,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library. `code()` identifies the contract
/// that was violated; `what()` carries a human-readable message that never
/// includes credentials.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agsynth
