#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dicore {

enum class ErrorCode {
  kMalformedOntology,
  kInvalidDocument,
  kInvalidPolicy,
  kMalformedVocabulary,
  kVocabCannotEncode,
  kUnknownState,
  kEmptyMask,
  kIllegalTransition,
  kBudgetExceeded,
  kBackendFailure,
  kTimeout,
  kContextOverflow,
  kCapabilityMismatch,
  kSpecConflict,
  kParseFailure,
  kIdMismatch,
  kShapeMismatch,
  kIoFailure,
  kInvalidArgument,
  kInvalidConfig,
};

/// Stable upper-snake name used in CLI error prefixes, e.g. "VOCAB_CANNOT_ENCODE".
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dicore
