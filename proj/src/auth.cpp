#include "rku/auth.hpp"

#include <sodium.h>

#include <stdexcept>

#include "rku/error.hpp"

namespace rku::auth {

namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw std::runtime_error("libsodium failed to initialise");
}

}  // namespace

HashCost HashCost::interactive() {
  return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

HashCost HashCost::minimum() { return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN}; }

std::string hash_password(std::string_view password, const HashCost& cost) {
  ensure_sodium();
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), cost.ops_limit, cost.mem_limit) !=
      0) {
    throw Error(ErrorCode::StorageFailure, "password hashing ran out of memory");
  }
  return out;
}

bool verify_password(std::string_view digest, std::string_view password) {
  ensure_sodium();
  const std::string terminated(digest);
  return crypto_pwhash_str_verify(terminated.c_str(), password.data(), password.size()) == 0;
}

std::string generate_token() {
  ensure_sodium();
  unsigned char raw[32];
  randombytes_buf(raw, sizeof raw);
  char hex[sizeof raw * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, raw, sizeof raw);
  return hex;
}

AuthService::AuthService(Store& store, Clock clock, AuthOptions options)
    : store_(store), clock_(std::move(clock)), options_(options) {}

void AuthService::check_password_strength(std::string_view password) const {
  if (password.size() < kMinPasswordLength) {
    throw Error(ErrorCode::WeakPassword, "password must have at least 8 characters");
  }
}

Customer AuthService::create_customer(std::string name, std::string email,
                                      std::optional<std::string> phone, std::string_view password) {
  check_password_strength(password);
  const std::string key = normalize_email(email);
  if (store_.find_account_by_email(key) || store_.find_customer_by_email(key)) {
    throw Error(ErrorCode::DuplicateEmail, "email already registered: " + key);
  }
  Customer c;
  c.name = std::move(name);
  c.email = key;
  if (phone && !trim(*phone).empty()) c.phone = trim(*phone);
  c.created_at = clock_();
  c = store_.save_customer(std::move(c));

  Account account;
  account.account_id = c.id;
  account.email = c.email;
  account.display_name = c.name;
  account.role = Role::Customer;
  account.password_digest = hash_password(password, options_.cost);
  store_.save_account(std::move(account));
  return c;
}

Customer AuthService::register_customer(std::string_view admin_token, std::string name,
                                        std::string email, std::optional<std::string> phone,
                                        std::string_view initial_password) {
  const auto caller = authenticate(admin_token);
  if (caller.role != Role::Admin) {
    throw Error(ErrorCode::Forbidden, "only an admin may register customers");
  }
  return create_customer(std::move(name), std::move(email), std::move(phone), initial_password);
}

Customer AuthService::provision_customer(std::string name, std::string email,
                                         std::optional<std::string> phone,
                                         std::string_view password) {
  return create_customer(std::move(name), std::move(email), std::move(phone), password);
}

Account AuthService::provision_account(Role role, std::string name, std::string email,
                                       std::string_view password) {
  if (role == Role::Customer) {
    throw Error(ErrorCode::Validation, "customer accounts are created with their customer record");
  }
  check_password_strength(password);
  if (trim(name).empty()) throw Error(ErrorCode::Validation, "account name must not be empty");
  const std::string key = normalize_email(email);
  if (store_.find_customer_by_email(key)) {
    throw Error(ErrorCode::DuplicateEmail, "email already registered: " + key);
  }
  Account account;
  account.email = key;
  account.display_name = trim(name);
  account.role = role;
  account.password_digest = hash_password(password, options_.cost);
  return store_.save_account(std::move(account));
}

bool AuthService::locked_out(const std::string& email, Timestamp now) {
  auto it = failures_.find(email);
  if (it == failures_.end()) return false;
  auto& times = it->second;
  while (!times.empty() && now - times.front() >= kFailureWindow) times.pop_front();
  if (times.empty()) {
    failures_.erase(it);
    return false;
  }
  return static_cast<int>(times.size()) >= kMaxFailuresPerWindow;
}

void AuthService::record_failure(const std::string& email, Timestamp now) {
  failures_[email].push_back(now);
}

SessionToken AuthService::login(std::string_view email, std::string_view password) {
  const auto now = clock_();
  const std::string key = normalize_email(email);
  {
    std::lock_guard lock(mutex_);
    if (locked_out(key, now)) {
      throw Error(ErrorCode::LockedOut, "too many failed attempts; try again later");
    }
  }

  const auto account = store_.find_account_by_email(key);
  bool ok = false;
  if (account) {
    ok = verify_password(account->password_digest, password);
  } else {
    // Unknown emails still pay for one verification so both failures look alike.
    std::call_once(decoy_once_,
                   [&] { decoy_digest_ = hash_password(generate_token(), options_.cost); });
    verify_password(decoy_digest_, password);
  }

  std::lock_guard lock(mutex_);
  if (!ok) {
    record_failure(key, now);
    throw Error(ErrorCode::AuthenticationFailed, "invalid email or password");
  }
  failures_.erase(key);
  SessionToken session;
  session.token = generate_token();
  session.account_id = account->account_id;
  session.role = account->role;
  session.expires_at = now + options_.token_ttl;
  sessions_[session.token] = session;
  return session;
}

Principal AuthService::authenticate(std::string_view token) {
  if (token.empty()) throw Error(ErrorCode::Unauthorized, "missing token");
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(std::string(token));
  if (it == sessions_.end()) throw Error(ErrorCode::Unauthorized, "unknown or expired token");
  if (now > it->second.expires_at) {
    sessions_.erase(it);
    throw Error(ErrorCode::Unauthorized, "unknown or expired token");
  }
  return Principal{it->second.account_id, it->second.role};
}

void AuthService::change_password(std::string_view token, std::string_view old_password,
                                  std::string_view new_password) {
  const auto caller = authenticate(token);
  auto account = store_.find_account(caller.account_id);
  if (!account || !verify_password(account->password_digest, old_password)) {
    throw Error(ErrorCode::AuthenticationFailed, "current password does not match");
  }
  check_password_strength(new_password);
  account->password_digest = hash_password(new_password, options_.cost);
  store_.save_account(std::move(*account));
}

void AuthService::logout(std::string_view token) {
  std::lock_guard lock(mutex_);
  sessions_.erase(std::string(token));
}

}  // namespace rku::auth
