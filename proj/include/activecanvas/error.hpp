#pragma once

#include <stdexcept>
#include <string>

namespace activecanvas {

enum class ErrorCode {
  kInvalidArgument,
  kDomain,
  kSampleTooSmall,
  kDimensionMismatch,
  kTooFewTouched,
  kNoFeatures,
  kParse,
  kRowCountMismatch,
  kDuplicateId,
  kNonFinite,
  kUnknownId,
  kNotFound,
  kIo,
  kCorruption,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the engine carries a machine-readable code so the
/// service layer can map it onto a protocol error without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace activecanvas
