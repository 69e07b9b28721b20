#include "rku/error.hpp"

namespace rku {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation: return "VALIDATION_ERROR";
    case ErrorCode::MalformedNota: return "MALFORMED_NOTA";
    case ErrorCode::InvalidTransition: return "INVALID_TRANSITION";
    case ErrorCode::ClockSkew: return "CLOCK_SKEW";
    case ErrorCode::EmptyQuery: return "EMPTY_QUERY";
    case ErrorCode::BadRequest: return "BAD_REQUEST";
    case ErrorCode::CorruptStore: return "CORRUPT_STORE";
    case ErrorCode::StorageFailure: return "STORAGE_FAILURE";
    case ErrorCode::StoreLocked: return "STORE_LOCKED";
    case ErrorCode::DuplicateEmail: return "DUPLICATE_EMAIL";
    case ErrorCode::DuplicateNota: return "DUPLICATE_NOTA";
    case ErrorCode::ForeignKeyViolation: return "FOREIGN_KEY_VIOLATION";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Unauthorized: return "UNAUTHORIZED";
    case ErrorCode::Forbidden: return "FORBIDDEN";
    case ErrorCode::AuthenticationFailed: return "AUTH_FAILED";
    case ErrorCode::WeakPassword: return "WEAK_PASSWORD";
    case ErrorCode::LockedOut: return "LOCKED_OUT";
  }
  return "UNKNOWN";
}

}  // namespace rku
