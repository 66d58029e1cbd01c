#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexiphy {

enum class ErrorCode {
  kEmptyForm,
  kMissingColumn,
  kDuplicateId,
  kBadValue,
  kIo,
  kBothEmpty,
  kConceptMismatch,
  kLabelMismatch,
  kParse,
  kNoInternalEdge,
  kTooFewLanguages,
  kDomainMismatch,
  kUnknownLeaf,
  kLeafSetMismatch,
  kInvalidArgument,
  kNumeric,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every library failure is reported through this type; `code()` lets callers
// (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &message) {
  throw Error(code, message);
}

}  // namespace lexiphy
