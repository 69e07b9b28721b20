#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "rku/store.hpp"
#include "rku/time.hpp"

namespace rku::auth {

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr int kMaxFailuresPerWindow = 5;
inline constexpr std::chrono::seconds kFailureWindow{60};

/// Argon2id cost. Defaults are libsodium's "interactive" limits.
struct HashCost {
  unsigned long long ops_limit;
  std::size_t mem_limit;

  static HashCost interactive();
  /// Lowest cost libsodium accepts; for tests only.
  static HashCost minimum();
};

/// Salted one-way digest in libsodium's self-describing string format.
std::string hash_password(std::string_view password, const HashCost& cost);
bool verify_password(std::string_view digest, std::string_view password);

/// 256 random bits, hex-encoded.
std::string generate_token();

struct SessionToken {
  std::string token;
  std::string account_id;
  Role role = Role::Customer;
  Timestamp expires_at{};
};

struct Principal {
  std::string account_id;
  Role role = Role::Customer;

  bool is_staff() const noexcept { return role == Role::Staff || role == Role::Admin; }
};

struct AuthOptions {
  std::chrono::seconds token_ttl{std::chrono::hours(24)};
  HashCost cost = HashCost::interactive();
};

/// Credential checks against the store plus an in-memory session table.
/// Safe to call concurrently.
class AuthService {
 public:
  AuthService(Store& store, Clock clock, AuthOptions options = {});

  /// Admin-only customer registration. Throws Error(Unauthorized),
  /// Error(Forbidden), Error(WeakPassword), Error(DuplicateEmail), Error(Validation).
  Customer register_customer(std::string_view admin_token, std::string name, std::string email,
                             std::optional<std::string> phone, std::string_view initial_password);

  /// Operator path (CLI, seed data): no token check, same validation.
  Customer provision_customer(std::string name, std::string email, std::optional<std::string> phone,
                              std::string_view password);
  /// Staff and Admin accounts exist only through this call.
  Account provision_account(Role role, std::string name, std::string email,
                            std::string_view password);

  /// Throws Error(AuthenticationFailed) for an unknown email and for a wrong
  /// password alike, and Error(LockedOut) after too many recent failures.
  SessionToken login(std::string_view email, std::string_view password);

  /// Throws Error(Unauthorized) for missing, unknown or expired tokens.
  Principal authenticate(std::string_view token);

  /// Throws Error(AuthenticationFailed) or Error(WeakPassword).
  void change_password(std::string_view token, std::string_view old_password,
                       std::string_view new_password);

  void logout(std::string_view token);

  std::chrono::seconds token_ttl() const noexcept { return options_.token_ttl; }

 private:
  bool locked_out(const std::string& email, Timestamp now);
  void record_failure(const std::string& email, Timestamp now);
  void check_password_strength(std::string_view password) const;
  Customer create_customer(std::string name, std::string email, std::optional<std::string> phone,
                           std::string_view password);

  Store& store_;
  Clock clock_;
  AuthOptions options_;

  std::once_flag decoy_once_;
  std::string decoy_digest_;

  std::mutex mutex_;
  std::unordered_map<std::string, SessionToken> sessions_;
  std::map<std::string, std::deque<Timestamp>> failures_;
};

}  // namespace rku::auth
