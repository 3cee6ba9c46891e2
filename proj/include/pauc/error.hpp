#pragma once

#include <stdexcept>
#include <string>

namespace pauc {

enum class ErrorCode {
  MissingFile,
  RaggedRows,
  UnparseableCell,
  EmptyClass,
  DegenerateSplit,
  DimensionMismatch,
  InvalidRange,
  BadShape,
  TooFewSamples,
  TooFewSamplesPerClass,
  LengthMismatch,
  NonFiniteObjective,
  InvalidConfig,
  BadFormat,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pauc
