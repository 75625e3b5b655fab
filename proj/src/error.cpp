#include "gazeintent/error.hpp"

namespace gazeintent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSample: return "invalid-sample";
    case ErrorCode::kInvalidInterval: return "invalid-interval";
    case ErrorCode::kEmptyWindow: return "empty-window";
    case ErrorCode::kStreamOrder: return "stream-order";
    case ErrorCode::kEmptyStream: return "empty-stream";
    case ErrorCode::kNoWindow: return "no-window";
    case ErrorCode::kParameterDomain: return "parameter-domain";
    case ErrorCode::kSupport: return "support";
    case ErrorCode::kDegenerateSample: return "degenerate-sample";
    case ErrorCode::kDegenerateTest: return "degenerate-test";
    case ErrorCode::kIncompleteData: return "incomplete-data";
    case ErrorCode::kInvalidObservation: return "invalid-observation";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kTraining: return "training";
    case ErrorCode::kInsufficientRows: return "insufficient-rows";
    case ErrorCode::kEmptyGrid: return "empty-grid";
    case ErrorCode::kUnknownMask: return "unknown-mask";
    case ErrorCode::kSpec: return "spec";
    case ErrorCode::kSchedule: return "schedule";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kMissingGroundTruth: return "missing-ground-truth";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

}  // namespace gazeintent
