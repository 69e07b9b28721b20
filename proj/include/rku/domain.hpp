#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rku/time.hpp"

// Domain values of the repair desk and the service-order lifecycle.
// Everything here is a pure value; mutation lives in rku::Store.

namespace rku {

using CustomerId = std::string;

/// Shop units that take repair orders. Marketing sells but never repairs,
/// so it is not representable here.
enum class Division { Printer, Software, Hardware };

enum class DeviceCategory { Computer, Printer, Accessory };

enum class OrderStatus {
  Received,
  Diagnosing,
  AwaitingParts,
  InRepair,
  Completed,
  PickedUp,
  Cancelled,
};

inline constexpr OrderStatus kAllStatuses[] = {
    OrderStatus::Received,  OrderStatus::Diagnosing, OrderStatus::AwaitingParts,
    OrderStatus::InRepair,  OrderStatus::Completed,  OrderStatus::PickedUp,
    OrderStatus::Cancelled,
};

std::string_view to_string(Division d) noexcept;
std::string_view to_string(DeviceCategory c) noexcept;
std::string_view to_string(OrderStatus s) noexcept;

// Parsers throw Error(Validation) on unknown names; "Marketing" is rejected
// with a dedicated message.
Division parse_division(std::string_view name);
DeviceCategory parse_device_category(std::string_view name);
OrderStatus parse_order_status(std::string_view name);

struct Customer {
  CustomerId id;
  std::string name;
  std::string email;  // stored case-folded
  std::optional<std::string> phone;
  Timestamp created_at{};

  friend bool operator==(const Customer&, const Customer&) = default;
};

/// Lower-cases and trims; does not validate.
std::string normalize_email(std::string_view email);
bool is_valid_email(std::string_view email);

/// Receipt number handed to the customer at intake: RKU-YYYYMMDD-NNNN.
class NotaNumber {
 public:
  static constexpr int kMaxSequence = 9999;

  /// Throws Error(MalformedNota) when seq is outside [1, 9999] or the date is invalid.
  NotaNumber(Date date, int seq);

  /// Throws Error(MalformedNota).
  static NotaNumber parse(std::string_view text);

  Date date() const noexcept { return date_; }
  int sequence() const noexcept { return seq_; }
  std::string str() const;

  friend bool operator==(const NotaNumber&, const NotaNumber&) = default;
  friend auto operator<=>(const NotaNumber& a, const NotaNumber& b) {
    if (auto c = a.date_ <=> b.date_; c != 0) return c;
    return a.seq_ <=> b.seq_;
  }

 private:
  Date date_;
  int seq_;
};

inline NotaNumber format_nota(Date date, int seq) { return NotaNumber(date, seq); }
inline NotaNumber parse_nota(std::string_view text) { return NotaNumber::parse(text); }

struct DeviceInfo {
  DeviceCategory category = DeviceCategory::Computer;
  std::string brand;
  std::string description;

  friend bool operator==(const DeviceInfo&, const DeviceInfo&) = default;
};

struct StatusEvent {
  OrderStatus status = OrderStatus::Received;
  Timestamp at{};
  std::string actor;
  std::optional<std::string> note;

  friend bool operator==(const StatusEvent&, const StatusEvent&) = default;
};

struct ServiceOrder {
  NotaNumber nota{Date{std::chrono::year{2000}, std::chrono::month{1}, std::chrono::day{1}}, 1};
  CustomerId customer_id;
  Division division = Division::Hardware;
  DeviceInfo device;
  std::string problem;
  std::vector<StatusEvent> history;

  /// Last element of history; the order never stores it separately.
  OrderStatus status() const { return history.back().status; }
  Timestamp last_update() const { return history.back().at; }

  friend bool operator==(const ServiceOrder&, const ServiceOrder&) = default;
};

/// Intake. The nota is a placeholder until the store issues one.
/// Throws Error(Validation) for a blank problem, blank device description
/// or an out-of-range division.
ServiceOrder new_order(CustomerId customer_id, Division division, DeviceInfo device,
                       std::string problem, std::string actor, Timestamp now);

/// Successors of `from` in the transition table; empty for terminal states.
std::vector<OrderStatus> legal_transitions(OrderStatus from);
bool is_legal_transition(OrderStatus from, OrderStatus to) noexcept;
bool is_terminal(OrderStatus s) noexcept;

/// Returns a copy of `order` with one event appended.
/// Throws Error(InvalidTransition) or Error(ClockSkew).
ServiceOrder transition(const ServiceOrder& order, OrderStatus to, std::string actor,
                        std::optional<std::string> note, Timestamp now);

/// Checks every ServiceOrder invariant; returns a description of the first
/// violation, or nullopt.
std::optional<std::string> check_order_invariants(const ServiceOrder& order);

/// Strips leading and trailing ASCII whitespace.
std::string trim(std::string_view s);

}  // namespace rku
