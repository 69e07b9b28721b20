#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "rku/domain.hpp"

namespace rku {

enum class ComplaintState { Open, Acknowledged, Resolved };
enum class Role { Customer, Staff, Admin };

std::string_view to_string(ComplaintState s) noexcept;
std::string_view to_string(Role r) noexcept;
ComplaintState parse_complaint_state(std::string_view name);
Role parse_role(std::string_view name);

struct Complaint {
  std::string id;
  CustomerId customer_id;
  std::optional<NotaNumber> nota;
  std::string text;
  Timestamp created_at{};
  ComplaintState state = ComplaintState::Open;

  friend bool operator==(const Complaint&, const Complaint&) = default;
};

struct FaqEntry {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<std::string> tags;

  friend bool operator==(const FaqEntry&, const FaqEntry&) = default;
};

/// Login credential. For customers, account_id equals the customer id.
struct Account {
  std::string account_id;
  std::string email;  // case-folded, unique across all accounts
  std::string display_name;
  Role role = Role::Customer;
  std::string password_digest;

  friend bool operator==(const Account&, const Account&) = default;
};

struct StoreSnapshot {
  std::map<CustomerId, Customer> customers;
  std::map<NotaNumber, ServiceOrder> orders;
  std::vector<Complaint> complaints;
  std::vector<FaqEntry> faq;
  std::map<Date, int> nota_counters;
  std::vector<Account> accounts;

  friend bool operator==(const StoreSnapshot&, const StoreSnapshot&) = default;
};

/// Throws Error(CorruptStore) naming the first offending record.
void validate_snapshot(const StoreSnapshot& snapshot);

/// Durable store rooted at a directory holding one JSON array per collection.
///
/// Writers are serialized; readers share the in-memory snapshot. Every
/// mutation is written to `<file>.tmp` and renamed over the live file
/// before the call returns, so an interrupted write leaves the previous
/// file intact. Readers never observe a mutation whose write failed.
class Store {
 public:
  static constexpr const char* kCustomersFile = "customers.json";
  static constexpr const char* kOrdersFile = "orders.json";
  static constexpr const char* kComplaintsFile = "complaints.json";
  static constexpr const char* kFaqFile = "faq.json";
  static constexpr const char* kCountersFile = "counters.json";
  static constexpr const char* kAccountsFile = "accounts.json";

  /// Called after a temp file is fully written and before it is renamed.
  /// Tests use it to simulate a crash by throwing.
  using CommitHook = std::function<void(const std::filesystem::path& final_path)>;

  /// Absent directory yields an empty store (created on first write).
  /// Throws Error(CorruptStore).
  explicit Store(std::filesystem::path root);

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::filesystem::path& root() const noexcept { return root_; }
  StoreSnapshot snapshot() const;

  void set_commit_hook(CommitHook hook);

  NotaNumber issue_nota(Date date);

  /// Inserts (empty id gets the next CUST-NNNN) or replaces by id.
  /// Throws Error(DuplicateEmail) or Error(Validation).
  Customer save_customer(Customer customer);
  std::optional<Customer> find_customer(const CustomerId& id) const;
  std::optional<Customer> find_customer_by_email(std::string_view email) const;
  std::vector<Customer> list_customers() const;

  /// Insert only. Throws Error(DuplicateNota), Error(ForeignKeyViolation)
  /// or Error(Validation) when the order breaks its invariants.
  void save_order(const ServiceOrder& order);

  /// Atomically replaces an order with update(current). The callback runs
  /// under the writer lock, so concurrent updates of one nota serialize.
  /// Returns nullopt when the nota is unknown.
  std::optional<ServiceOrder> update_order(
      const NotaNumber& nota, const std::function<ServiceOrder(const ServiceOrder&)>& update);

  std::optional<ServiceOrder> find_order_by_nota(const NotaNumber& nota) const;
  std::vector<ServiceOrder> list_orders_by_customer(const CustomerId& id) const;
  std::vector<ServiceOrder> list_orders() const;

  /// Assigns id CMP-NNNN. Throws Error(ForeignKeyViolation) or Error(Validation).
  Complaint append_complaint(Complaint complaint);
  /// Insertion order.
  std::vector<Complaint> list_complaints(std::optional<ComplaintState> state = std::nullopt) const;
  std::optional<Complaint> find_complaint(const std::string& id) const;
  /// Throws Error(NotFound).
  Complaint set_complaint_state(const std::string& id, ComplaintState state);

  /// Empty id inserts as FAQ-NNNN; otherwise replaces by id.
  FaqEntry upsert_faq(FaqEntry entry);
  std::vector<FaqEntry> list_faq() const;

  /// Empty account_id inserts as ACC-NNNN; otherwise replaces by id.
  /// Throws Error(DuplicateEmail).
  Account save_account(Account account);
  std::optional<Account> find_account(const std::string& account_id) const;
  std::optional<Account> find_account_by_email(std::string_view email) const;

 private:
  void write_file(const char* name, const std::string& contents);
  void persist_customers(const StoreSnapshot& next);
  void persist_orders(const StoreSnapshot& next);
  void persist_complaints(const StoreSnapshot& next);
  void persist_faq(const StoreSnapshot& next);
  void persist_counters(const StoreSnapshot& next);
  void persist_accounts(const StoreSnapshot& next);
  void ensure_root();

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  StoreSnapshot data_;
  CommitHook commit_hook_;
};

}  // namespace rku
