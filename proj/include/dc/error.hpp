#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dc {

// Machine-readable failure categories. The names double as the `code`
// strings used on the wire.
enum class ErrorCode {
  kMalformedDcid,
  kMalformedValue,
  kUnknownProvenance,
  kProvenanceConflict,
  kNotAStatVar,
  kMissingRequiredProperty,
  kInvalidConstraintProperty,
  kInvalidDescription,
  kInvalidRange,
  kTemplateInvalid,
  kCsvMalformed,
  kEncoding,
  kDecode,
  kConfig,
  kStorage,
  kTransport,
  kBadRequest,
  kNotFound,
  kUnauthorized,
  kForbidden,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dc
