#include "dicore/error.hpp"

namespace dicore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedOntology: return "MALFORMED_ONTOLOGY";
    case ErrorCode::kInvalidDocument: return "INVALID_DOCUMENT";
    case ErrorCode::kInvalidPolicy: return "INVALID_POLICY";
    case ErrorCode::kMalformedVocabulary: return "MALFORMED_VOCABULARY";
    case ErrorCode::kVocabCannotEncode: return "VOCAB_CANNOT_ENCODE";
    case ErrorCode::kUnknownState: return "UNKNOWN_STATE";
    case ErrorCode::kEmptyMask: return "EMPTY_MASK";
    case ErrorCode::kIllegalTransition: return "ILLEGAL_TRANSITION";
    case ErrorCode::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::kBackendFailure: return "BACKEND_FAILURE";
    case ErrorCode::kTimeout: return "TIMEOUT";
    case ErrorCode::kContextOverflow: return "CONTEXT_OVERFLOW";
    case ErrorCode::kCapabilityMismatch: return "CAPABILITY_MISMATCH";
    case ErrorCode::kSpecConflict: return "SPEC_CONFLICT";
    case ErrorCode::kParseFailure: return "PARSE_FAILURE";
    case ErrorCode::kIdMismatch: return "ID_MISMATCH";
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kIoFailure: return "IO_FAILURE";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dicore
