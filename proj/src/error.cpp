#include "activecanvas/error.hpp"

namespace activecanvas {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kSampleTooSmall: return "sample-too-small";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kTooFewTouched: return "too-few-touched";
    case ErrorCode::kNoFeatures: return "no-features";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kRowCountMismatch: return "row-count-mismatch";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kUnknownId: return "unknown-id";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kCorruption: return "corruption";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

}  // namespace activecanvas
