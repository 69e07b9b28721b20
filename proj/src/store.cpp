#include "rku/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rku/error.hpp"
#include "rku/json_codec.hpp"

namespace rku {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ComplaintState s) noexcept {
  switch (s) {
    case ComplaintState::Open: return "Open";
    case ComplaintState::Acknowledged: return "Acknowledged";
    case ComplaintState::Resolved: return "Resolved";
  }
  return "?";
}

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::Customer: return "Customer";
    case Role::Staff: return "Staff";
    case Role::Admin: return "Admin";
  }
  return "?";
}

ComplaintState parse_complaint_state(std::string_view name) {
  for (auto s : {ComplaintState::Open, ComplaintState::Acknowledged, ComplaintState::Resolved}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::Validation, "unknown complaint state: " + std::string(name));
}

Role parse_role(std::string_view name) {
  for (auto r : {Role::Customer, Role::Staff, Role::Admin}) {
    if (name == to_string(r)) return r;
  }
  throw Error(ErrorCode::Validation, "unknown role: " + std::string(name));
}

namespace {

constexpr auto kDumpIndent = 2;

std::string dump(const json& j) {
  return j.dump(kDumpIndent, ' ', false, json::error_handler_t::replace) + "\n";
}

[[noreturn]] void corrupt(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::CorruptStore, where + ": " + what);
}

/// Highest numeric suffix among ids "<prefix>NNNN", plus one, zero-padded.
template <class Range, class IdOf>
std::string next_id(const Range& items, std::string_view prefix, IdOf id_of) {
  long max_seen = 0;
  for (const auto& item : items) {
    const std::string& id = id_of(item);
    if (id.rfind(prefix, 0) != 0) continue;
    const auto digits = id.substr(prefix.size());
    const bool numeric =
        !digits.empty() && digits.size() <= 9 &&
        std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!numeric) continue;
    max_seen = std::max(max_seen, std::stol(digits));
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04ld", max_seen + 1);
  return std::string(prefix) + buf;
}

std::optional<json> read_json_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) corrupt(path.filename().string(), "cannot be read");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    corrupt(path.filename().string(), std::string("parse failure: ") + e.what());
  }
}

template <class Fn>
void for_each_record(const json& arr, const char* file, Fn&& fn) {
  if (!arr.is_array()) corrupt(file, "expected a JSON array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      fn(arr[i]);
    } catch (const json::exception& e) {
      corrupt(std::string(file) + "[" + std::to_string(i) + "]", e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CorruptStore) throw;
      corrupt(std::string(file) + "[" + std::to_string(i) + "]", e.what());
    }
  }
}

bool blank(std::string_view s) { return trim(s).empty(); }

json counters_json(const std::map<Date, int>& counters) {
  json j = json::object();
  for (const auto& [date, seq] : counters) j[format_compact_date(date)] = seq;
  return j;
}

}  // namespace

void validate_snapshot(const StoreSnapshot& s) {
  std::set<std::string> emails;
  for (const auto& [id, c] : s.customers) {
    const std::string where = "customers[" + id + "]";
    if (id.empty() || c.id != id) corrupt(where, "id mismatch");
    if (blank(c.name)) corrupt(where, "name is empty");
    if (!is_valid_email(c.email) || normalize_email(c.email) != c.email) {
      corrupt(where, "email is not a normalized address");
    }
    if (!emails.insert(c.email).second) corrupt(where, "duplicate email " + c.email);
  }

  for (const auto& [nota, o] : s.orders) {
    const std::string where = "orders[" + nota.str() + "]";
    if (!(o.nota == nota)) corrupt(where, "nota mismatch");
    if (!s.customers.count(o.customer_id)) {
      corrupt(where, "customer " + o.customer_id + " does not exist");
    }
    if (auto problem = check_order_invariants(o)) corrupt(where, *problem);
    auto it = s.nota_counters.find(nota.date());
    if (it == s.nota_counters.end() || it->second < nota.sequence()) {
      corrupt(where, "nota counter for its date is behind the sequence");
    }
  }

  std::set<std::string> complaint_ids;
  for (const auto& c : s.complaints) {
    const std::string where = "complaints[" + c.id + "]";
    if (c.id.empty() || !complaint_ids.insert(c.id).second)
      corrupt(where, "missing or duplicate id");
    if (blank(c.text)) corrupt(where, "text is empty");
    if (!s.customers.count(c.customer_id)) corrupt(where, "customer does not exist");
    if (c.nota && !s.orders.count(*c.nota)) corrupt(where, "nota does not exist");
  }

  std::set<std::string> faq_ids;
  for (const auto& f : s.faq) {
    const std::string where = "faq[" + f.id + "]";
    if (f.id.empty() || !faq_ids.insert(f.id).second) corrupt(where, "missing or duplicate id");
    if (blank(f.question) || blank(f.answer)) corrupt(where, "question or answer is empty");
  }

  for (const auto& [date, seq] : s.nota_counters) {
    if (!date.ok() || seq < 0 || seq > NotaNumber::kMaxSequence) {
      corrupt("counters[" + format_compact_date(date) + "]", "out of range");
    }
  }

  std::set<std::string> account_ids;
  std::set<std::string> account_emails;
  for (const auto& a : s.accounts) {
    const std::string where = "accounts[" + a.account_id + "]";
    if (a.account_id.empty() || !account_ids.insert(a.account_id).second) {
      corrupt(where, "missing or duplicate id");
    }
    if (!account_emails.insert(a.email).second) corrupt(where, "duplicate email");
    if (a.password_digest.empty()) corrupt(where, "missing password digest");
    if (a.role == Role::Customer) {
      auto it = s.customers.find(a.account_id);
      if (it == s.customers.end()) corrupt(where, "customer does not exist");
      if (it->second.email != a.email) corrupt(where, "email differs from customer record");
    }
  }
}

Store::Store(fs::path root) : root_(std::move(root)) {
  StoreSnapshot s;
  if (auto j = read_json_file(root_ / kCustomersFile)) {
    for_each_record(*j, kCustomersFile, [&](const json& r) {
      auto c = r.get<Customer>();
      const auto id = c.id;
      if (!s.customers.emplace(id, std::move(c)).second) corrupt(id, "duplicate customer id");
    });
  }
  if (auto j = read_json_file(root_ / kOrdersFile)) {
    for_each_record(*j, kOrdersFile, [&](const json& r) {
      auto o = order_from_json(r);
      const auto nota = o.nota;
      if (!s.orders.emplace(nota, std::move(o)).second) corrupt(nota.str(), "duplicate nota");
    });
  }
  if (auto j = read_json_file(root_ / kComplaintsFile)) {
    for_each_record(*j, kComplaintsFile,
                    [&](const json& r) { s.complaints.push_back(r.get<Complaint>()); });
  }
  if (auto j = read_json_file(root_ / kFaqFile)) {
    for_each_record(*j, kFaqFile, [&](const json& r) { s.faq.push_back(r.get<FaqEntry>()); });
  }
  if (auto j = read_json_file(root_ / kCountersFile)) {
    if (!j->is_object()) corrupt(kCountersFile, "expected a JSON object");
    for (const auto& [key, value] : j->items()) {
      Date d;
      if (!parse_compact_date(key, d) || !value.is_number_integer()) {
        corrupt(std::string(kCountersFile) + "[" + key + "]", "malformed entry");
      }
      s.nota_counters[d] = value.get<int>();
    }
  }
  if (auto j = read_json_file(root_ / kAccountsFile)) {
    for_each_record(*j, kAccountsFile,
                    [&](const json& r) { s.accounts.push_back(r.get<Account>()); });
  }
  validate_snapshot(s);
  data_ = std::move(s);
}

StoreSnapshot Store::snapshot() const {
  std::shared_lock lock(mutex_);
  return data_;
}

void Store::set_commit_hook(CommitHook hook) {
  std::unique_lock lock(mutex_);
  commit_hook_ = std::move(hook);
}

void Store::ensure_root() {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create store directory: " + ec.message());
}

void Store::write_file(const char* name, const std::string& contents) {
  ensure_root();
  const fs::path final_path = root_ / name;
  const fs::path tmp_path = root_ / (std::string(name) + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot open " + tmp_path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp_path.string());
  }
  if (int fd = ::open(tmp_path.c_str(), O_RDONLY); fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  if (commit_hook_) commit_hook_(final_path);
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot commit " + final_path.string());
}

void Store::persist_customers(const StoreSnapshot& next) {
  json arr = json::array();
  for (const auto& [id, c] : next.customers) arr.push_back(c);
  write_file(kCustomersFile, dump(arr));
}

void Store::persist_orders(const StoreSnapshot& next) {
  json arr = json::array();
  for (const auto& [nota, o] : next.orders) arr.push_back(o);
  write_file(kOrdersFile, dump(arr));
}

void Store::persist_complaints(const StoreSnapshot& next) {
  write_file(kComplaintsFile, dump(json(next.complaints)));
}

void Store::persist_faq(const StoreSnapshot& next) { write_file(kFaqFile, dump(json(next.faq))); }

void Store::persist_counters(const StoreSnapshot& next) {
  write_file(kCountersFile, dump(counters_json(next.nota_counters)));
}

void Store::persist_accounts(const StoreSnapshot& next) {
  write_file(kAccountsFile, dump(json(next.accounts)));
}

NotaNumber Store::issue_nota(Date date) {
  std::unique_lock lock(mutex_);
  const int next_seq = data_.nota_counters[date] + 1;
  if (next_seq > NotaNumber::kMaxSequence) {
    throw Error(ErrorCode::StorageFailure,
                "daily nota sequence exhausted for " + format_compact_date(date));
  }
  NotaNumber nota(date, next_seq);
  StoreSnapshot next;
  next.nota_counters = data_.nota_counters;
  next.nota_counters[date] = next_seq;
  try {
    persist_counters(next);
  } catch (...) {
    if (data_.nota_counters[date] == 0) data_.nota_counters.erase(date);
    throw;
  }
  data_.nota_counters = std::move(next.nota_counters);
  return nota;
}

Customer Store::save_customer(Customer customer) {
  customer.email = normalize_email(customer.email);
  customer.name = trim(customer.name);
  if (customer.name.empty()) throw Error(ErrorCode::Validation, "customer name must not be empty");
  if (!is_valid_email(customer.email)) {
    throw Error(ErrorCode::Validation, "invalid email address: " + customer.email);
  }

  std::unique_lock lock(mutex_);
  if (customer.id.empty()) {
    customer.id = next_id(data_.customers, "CUST-",
                          [](const auto& kv) -> const std::string& { return kv.first; });
  }
  for (const auto& [id, other] : data_.customers) {
    if (id != customer.id && other.email == customer.email) {
      throw Error(ErrorCode::DuplicateEmail, "email already registered: " + customer.email);
    }
  }
  StoreSnapshot next;
  next.customers = data_.customers;
  next.customers[customer.id] = customer;
  persist_customers(next);
  data_.customers = std::move(next.customers);
  return customer;
}

std::optional<Customer> Store::find_customer(const CustomerId& id) const {
  std::shared_lock lock(mutex_);
  auto it = data_.customers.find(id);
  if (it == data_.customers.end()) return std::nullopt;
  return it->second;
}

std::optional<Customer> Store::find_customer_by_email(std::string_view email) const {
  const auto key = normalize_email(email);
  std::shared_lock lock(mutex_);
  for (const auto& [id, c] : data_.customers) {
    if (c.email == key) return c;
  }
  return std::nullopt;
}

std::vector<Customer> Store::list_customers() const {
  std::shared_lock lock(mutex_);
  std::vector<Customer> out;
  for (const auto& [id, c] : data_.customers) out.push_back(c);
  return out;
}

void Store::save_order(const ServiceOrder& order) {
  if (auto problem = check_order_invariants(order)) {
    throw Error(ErrorCode::Validation, "order " + order.nota.str() + ": " + *problem);
  }
  std::unique_lock lock(mutex_);
  if (data_.orders.count(order.nota)) {
    throw Error(ErrorCode::DuplicateNota, "nota already exists: " + order.nota.str());
  }
  if (!data_.customers.count(order.customer_id)) {
    throw Error(ErrorCode::ForeignKeyViolation, "unknown customer: " + order.customer_id);
  }
  auto counter = data_.nota_counters.find(order.nota.date());
  if (counter == data_.nota_counters.end() || counter->second < order.nota.sequence()) {
    throw Error(ErrorCode::Validation,
                "nota " + order.nota.str() + " was not issued by this store");
  }
  StoreSnapshot next;
  next.orders = data_.orders;
  next.orders.emplace(order.nota, order);
  persist_orders(next);
  data_.orders = std::move(next.orders);
}

std::optional<ServiceOrder> Store::update_order(
    const NotaNumber& nota, const std::function<ServiceOrder(const ServiceOrder&)>& update) {
  std::unique_lock lock(mutex_);
  auto it = data_.orders.find(nota);
  if (it == data_.orders.end()) return std::nullopt;
  ServiceOrder updated = update(it->second);
  if (updated == it->second) return updated;
  if (!(updated.nota == nota) || updated.customer_id != it->second.customer_id) {
    throw Error(ErrorCode::Validation, "order identity cannot change");
  }
  if (auto problem = check_order_invariants(updated)) {
    throw Error(ErrorCode::Validation, "order " + nota.str() + ": " + *problem);
  }
  StoreSnapshot next;
  next.orders = data_.orders;
  next.orders[nota] = updated;
  persist_orders(next);
  data_.orders = std::move(next.orders);
  return updated;
}

std::optional<ServiceOrder> Store::find_order_by_nota(const NotaNumber& nota) const {
  std::shared_lock lock(mutex_);
  auto it = data_.orders.find(nota);
  if (it == data_.orders.end()) return std::nullopt;
  return it->second;
}

std::vector<ServiceOrder> Store::list_orders_by_customer(const CustomerId& id) const {
  std::shared_lock lock(mutex_);
  std::vector<ServiceOrder> out;
  for (const auto& [nota, o] : data_.orders) {
    if (o.customer_id == id) out.push_back(o);
  }
  return out;
}

std::vector<ServiceOrder> Store::list_orders() const {
  std::shared_lock lock(mutex_);
  std::vector<ServiceOrder> out;
  for (const auto& [nota, o] : data_.orders) out.push_back(o);
  return out;
}

Complaint Store::append_complaint(Complaint complaint) {
  if (blank(complaint.text)) throw Error(ErrorCode::Validation, "complaint text must not be empty");
  std::unique_lock lock(mutex_);
  if (!data_.customers.count(complaint.customer_id)) {
    throw Error(ErrorCode::ForeignKeyViolation, "unknown customer: " + complaint.customer_id);
  }
  if (complaint.nota && !data_.orders.count(*complaint.nota)) {
    throw Error(ErrorCode::ForeignKeyViolation, "unknown nota: " + complaint.nota->str());
  }
  complaint.id = next_id(data_.complaints, "CMP-",
                         [](const Complaint& c) -> const std::string& { return c.id; });
  StoreSnapshot next;
  next.complaints = data_.complaints;
  next.complaints.push_back(complaint);
  persist_complaints(next);
  data_.complaints = std::move(next.complaints);
  return complaint;
}

std::vector<Complaint> Store::list_complaints(std::optional<ComplaintState> state) const {
  std::shared_lock lock(mutex_);
  std::vector<Complaint> out;
  for (const auto& c : data_.complaints) {
    if (!state || c.state == *state) out.push_back(c);
  }
  return out;
}

std::optional<Complaint> Store::find_complaint(const std::string& id) const {
  std::shared_lock lock(mutex_);
  for (const auto& c : data_.complaints) {
    if (c.id == id) return c;
  }
  return std::nullopt;
}

Complaint Store::set_complaint_state(const std::string& id, ComplaintState state) {
  std::unique_lock lock(mutex_);
  StoreSnapshot next;
  next.complaints = data_.complaints;
  auto it = std::find_if(next.complaints.begin(), next.complaints.end(),
                         [&](const Complaint& c) { return c.id == id; });
  if (it == next.complaints.end()) throw Error(ErrorCode::NotFound, "unknown complaint: " + id);
  it->state = state;
  Complaint updated = *it;
  persist_complaints(next);
  data_.complaints = std::move(next.complaints);
  return updated;
}

FaqEntry Store::upsert_faq(FaqEntry entry) {
  if (blank(entry.question) || blank(entry.answer)) {
    throw Error(ErrorCode::Validation, "FAQ question and answer must not be empty");
  }
  std::unique_lock lock(mutex_);
  StoreSnapshot next;
  next.faq = data_.faq;
  if (entry.id.empty()) {
    entry.id =
        next_id(data_.faq, "FAQ-", [](const FaqEntry& f) -> const std::string& { return f.id; });
  }
  auto it = std::find_if(next.faq.begin(), next.faq.end(),
                         [&](const FaqEntry& f) { return f.id == entry.id; });
  if (it == next.faq.end()) {
    next.faq.push_back(entry);
  } else {
    *it = entry;
  }
  persist_faq(next);
  data_.faq = std::move(next.faq);
  return entry;
}

std::vector<FaqEntry> Store::list_faq() const {
  std::shared_lock lock(mutex_);
  return data_.faq;
}

Account Store::save_account(Account account) {
  account.email = normalize_email(account.email);
  if (!is_valid_email(account.email)) {
    throw Error(ErrorCode::Validation, "invalid email address: " + account.email);
  }
  if (account.password_digest.empty())
    throw Error(ErrorCode::Validation, "missing password digest");
  std::unique_lock lock(mutex_);
  if (account.account_id.empty()) {
    account.account_id =
        next_id(data_.accounts, "ACC-",
                [](const Account& a) -> const std::string& { return a.account_id; });
  }
  if (account.role == Role::Customer) {
    auto c = data_.customers.find(account.account_id);
    if (c == data_.customers.end() || c->second.email != account.email) {
      throw Error(ErrorCode::ForeignKeyViolation, "customer account needs a matching customer");
    }
  }
  for (const auto& other : data_.accounts) {
    if (other.account_id != account.account_id && other.email == account.email) {
      throw Error(ErrorCode::DuplicateEmail, "email already registered: " + account.email);
    }
  }
  StoreSnapshot next;
  next.accounts = data_.accounts;
  auto it = std::find_if(next.accounts.begin(), next.accounts.end(),
                         [&](const Account& a) { return a.account_id == account.account_id; });
  if (it == next.accounts.end()) {
    next.accounts.push_back(account);
  } else {
    *it = account;
  }
  persist_accounts(next);
  data_.accounts = std::move(next.accounts);
  return account;
}

std::optional<Account> Store::find_account(const std::string& account_id) const {
  std::shared_lock lock(mutex_);
  for (const auto& a : data_.accounts) {
    if (a.account_id == account_id) return a;
  }
  return std::nullopt;
}

std::optional<Account> Store::find_account_by_email(std::string_view email) const {
  const auto key = normalize_email(email);
  std::shared_lock lock(mutex_);
  for (const auto& a : data_.accounts) {
    if (a.email == key) return a;
  }
  return std::nullopt;
}

}  // namespace rku
