#include "pauc/error.hpp"

namespace pauc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::UnparseableCell: return "UnparseableCell";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooFewSamplesPerClass: return "TooFewSamplesPerClass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

}  // namespace pauc
