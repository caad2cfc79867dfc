#include "lci/error.hpp"

namespace lci {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonMonotonicFrames: return "NonMonotonicFrames";
    case ErrorCode::EmptyRecording: return "EmptyRecording";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::MissingLateralData: return "MissingLateralData";
    case ErrorCode::SameLane: return "SameLane";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TrackTooShort: return "TrackTooShort";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::InvalidFractions: return "InvalidFractions";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::UnassignedLocation: return "UnassignedLocation";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::TooFewSamplesPerClass: return "TooFewSamplesPerClass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure:
    case ErrorCode::NonFiniteLoss:
      return false;
    default:
      return true;
  }
}

}  // namespace lci
