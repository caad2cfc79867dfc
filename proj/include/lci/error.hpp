#pragma once

#include <stdexcept>
#include <string>

namespace lci {

enum class ErrorCode {
  // data_ingest
  MissingColumn,
  NonMonotonicFrames,
  EmptyRecording,
  IoFailure,
  InfeasibleConfig,
  // labeling
  MissingLateralData,
  SameLane,
  OutOfRange,
  TrackTooShort,
  // features
  TooFewFrames,
  SchemaMismatch,
  // imbalance
  TooFewSamples,
  EmptyClass,
  DegenerateInput,
  // gbdt
  EmptyMatrix,
  InvalidFractions,
  SingleClass,
  // bilstm
  ShapeMismatch,
  EmptySequence,
  NonFiniteLoss,
  // pipeline
  UnassignedLocation,
  EmptySpace,
  TooFewSamplesPerClass,
  // eval
  LengthMismatch,
  EmptyInput,
  // generic
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// True for errors caused by bad input/configuration (CLI exit 1);
// false for runtime failures such as I/O (CLI exit 2).
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lci
