#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rku {

enum class ErrorCode {
  Validation,
  MalformedNota,
  InvalidTransition,
  ClockSkew,
  EmptyQuery,
  BadRequest,
  CorruptStore,
  StorageFailure,
  StoreLocked,
  DuplicateEmail,
  DuplicateNota,
  ForeignKeyViolation,
  NotFound,
  Unauthorized,
  Forbidden,
  AuthenticationFailed,
  WeakPassword,
  LockedOut,
};

/// Machine-readable name, e.g. "INVALID_TRANSITION".
std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rku
