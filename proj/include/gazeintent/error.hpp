#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gazeintent {

enum class ErrorCode {
  kInvalidSample,
  kInvalidInterval,
  kEmptyWindow,
  kStreamOrder,
  kEmptyStream,
  kNoWindow,
  kParameterDomain,
  kSupport,
  kDegenerateSample,
  kDegenerateTest,
  kIncompleteData,
  kInvalidObservation,
  kDimensionMismatch,
  kTraining,
  kInsufficientRows,
  kEmptyGrid,
  kUnknownMask,
  kSpec,
  kSchedule,
  kConfiguration,
  kMissingGroundTruth,
  kFormat,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gazeintent
