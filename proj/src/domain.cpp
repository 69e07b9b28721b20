#include "rku/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

#include "rku/error.hpp"

namespace rku {

namespace {

struct Edge {
  OrderStatus from;
  OrderStatus to;
};

// The only legal lifecycle steps.
constexpr std::array kTransitionTable = {
    Edge{OrderStatus::Received, OrderStatus::Diagnosing},
    Edge{OrderStatus::Received, OrderStatus::Cancelled},
    Edge{OrderStatus::Diagnosing, OrderStatus::InRepair},
    Edge{OrderStatus::Diagnosing, OrderStatus::AwaitingParts},
    Edge{OrderStatus::Diagnosing, OrderStatus::Cancelled},
    Edge{OrderStatus::AwaitingParts, OrderStatus::InRepair},
    Edge{OrderStatus::AwaitingParts, OrderStatus::Cancelled},
    Edge{OrderStatus::InRepair, OrderStatus::Completed},
    Edge{OrderStatus::InRepair, OrderStatus::AwaitingParts},
    Edge{OrderStatus::InRepair, OrderStatus::Cancelled},
    Edge{OrderStatus::Completed, OrderStatus::PickedUp},
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view to_string(Division d) noexcept {
  switch (d) {
    case Division::Printer: return "Printer";
    case Division::Software: return "Software";
    case Division::Hardware: return "Hardware";
  }
  return "?";
}

std::string_view to_string(DeviceCategory c) noexcept {
  switch (c) {
    case DeviceCategory::Computer: return "Computer";
    case DeviceCategory::Printer: return "Printer";
    case DeviceCategory::Accessory: return "Accessory";
  }
  return "?";
}

std::string_view to_string(OrderStatus s) noexcept {
  switch (s) {
    case OrderStatus::Received: return "Received";
    case OrderStatus::Diagnosing: return "Diagnosing";
    case OrderStatus::AwaitingParts: return "AwaitingParts";
    case OrderStatus::InRepair: return "InRepair";
    case OrderStatus::Completed: return "Completed";
    case OrderStatus::PickedUp: return "PickedUp";
    case OrderStatus::Cancelled: return "Cancelled";
  }
  return "?";
}

Division parse_division(std::string_view name) {
  for (auto d : {Division::Printer, Division::Software, Division::Hardware}) {
    if (name == to_string(d)) return d;
  }
  if (name == "Marketing") {
    throw Error(ErrorCode::Validation, "the Marketing division does not take repair orders");
  }
  throw Error(ErrorCode::Validation, "unknown division: " + std::string(name));
}

DeviceCategory parse_device_category(std::string_view name) {
  for (auto c : {DeviceCategory::Computer, DeviceCategory::Printer, DeviceCategory::Accessory}) {
    if (name == to_string(c)) return c;
  }
  throw Error(ErrorCode::Validation, "unknown device category: " + std::string(name));
}

OrderStatus parse_order_status(std::string_view name) {
  for (auto s : kAllStatuses) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::Validation, "unknown order status: " + std::string(name));
}

std::string trim(std::string_view s) {
  auto begin = std::find_if_not(s.begin(), s.end(), is_space);
  auto end = std::find_if_not(s.rbegin(), std::string_view::reverse_iterator(begin), is_space);
  return std::string(begin, end.base());
}

std::string normalize_email(std::string_view email) {
  std::string out = trim(email);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_valid_email(std::string_view email) {
  if (email.empty() || std::any_of(email.begin(), email.end(), is_space)) return false;
  const auto at = email.find('@');
  if (at == std::string_view::npos || at == 0 ||
      email.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  const auto domain = email.substr(at + 1);
  const auto dot = domain.find('.');
  return dot != std::string_view::npos && dot != 0 && domain.back() != '.' &&
         domain.find("..") == std::string_view::npos;
}

NotaNumber::NotaNumber(Date date, int seq) : date_(date), seq_(seq) {
  if (!date.ok()) throw Error(ErrorCode::MalformedNota, "nota date is not a calendar date");
  if (seq < 1 || seq > kMaxSequence) {
    throw Error(ErrorCode::MalformedNota, "nota sequence must be within 1..9999");
  }
  if (static_cast<int>(date.year()) < 0 || static_cast<int>(date.year()) > 9999) {
    throw Error(ErrorCode::MalformedNota, "nota year must have four digits");
  }
}

NotaNumber NotaNumber::parse(std::string_view text) {
  const auto malformed = [&] {
    return Error(ErrorCode::MalformedNota, "malformed nota: " + std::string(text));
  };
  // RKU-YYYYMMDD-NNNN
  if (text.size() != 17 || text.substr(0, 4) != "RKU-" || text[12] != '-') throw malformed();
  Date date;
  if (!parse_compact_date(text.substr(4, 8), date)) throw malformed();
  int seq = 0;
  for (char c : text.substr(13)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw malformed();
    seq = seq * 10 + (c - '0');
  }
  if (seq < 1) throw malformed();
  return NotaNumber(date, seq);
}

std::string NotaNumber::str() const {
  char seq[8];
  std::snprintf(seq, sizeof seq, "%04d", seq_);
  return "RKU-" + format_compact_date(date_) + "-" + seq;
}

ServiceOrder new_order(CustomerId customer_id, Division division, DeviceInfo device,
                       std::string problem, std::string actor, Timestamp now) {
  switch (division) {
    case Division::Printer:
    case Division::Software:
    case Division::Hardware: break;
    default: throw Error(ErrorCode::Validation, "division does not take repair orders");
  }
  if (trim(problem).empty()) throw Error(ErrorCode::Validation, "problem must not be empty");
  if (trim(device.description).empty()) {
    throw Error(ErrorCode::Validation, "device description must not be empty");
  }
  if (trim(customer_id).empty()) throw Error(ErrorCode::Validation, "customer id is required");

  ServiceOrder order;
  order.customer_id = std::move(customer_id);
  order.division = division;
  order.device = std::move(device);
  order.problem = std::move(problem);
  order.history.push_back(StatusEvent{OrderStatus::Received, now, std::move(actor), std::nullopt});
  return order;
}

std::vector<OrderStatus> legal_transitions(OrderStatus from) {
  std::vector<OrderStatus> out;
  for (const auto& e : kTransitionTable) {
    if (e.from == from) out.push_back(e.to);
  }
  return out;
}

bool is_legal_transition(OrderStatus from, OrderStatus to) noexcept {
  return std::any_of(kTransitionTable.begin(), kTransitionTable.end(),
                     [&](const Edge& e) { return e.from == from && e.to == to; });
}

bool is_terminal(OrderStatus s) noexcept {
  return s == OrderStatus::PickedUp || s == OrderStatus::Cancelled;
}

ServiceOrder transition(const ServiceOrder& order, OrderStatus to, std::string actor,
                        std::optional<std::string> note, Timestamp now) {
  if (order.history.empty()) throw Error(ErrorCode::Validation, "order has no history");
  const auto from = order.status();
  if (!is_legal_transition(from, to)) {
    throw Error(ErrorCode::InvalidTransition, "cannot move order " + order.nota.str() + " from " +
                                                  std::string(to_string(from)) + " to " +
                                                  std::string(to_string(to)));
  }
  if (now < order.last_update()) {
    throw Error(ErrorCode::ClockSkew, "transition time " + format_iso8601(now) +
                                          " precedes last event at " +
                                          format_iso8601(order.last_update()));
  }
  ServiceOrder next = order;
  next.history.push_back(StatusEvent{to, now, std::move(actor), std::move(note)});
  return next;
}

std::optional<std::string> check_order_invariants(const ServiceOrder& order) {
  if (order.history.empty()) return "history is empty";
  if (order.history.front().status != OrderStatus::Received) {
    return "history does not start at Received";
  }
  if (trim(order.problem).empty()) return "problem is empty";
  if (trim(order.device.description).empty()) return "device description is empty";
  for (std::size_t i = 1; i < order.history.size(); ++i) {
    const auto& prev = order.history[i - 1];
    const auto& cur = order.history[i];
    if (!is_legal_transition(prev.status, cur.status)) {
      return "illegal step " + std::string(to_string(prev.status)) + " -> " +
             std::string(to_string(cur.status)) + " at history[" + std::to_string(i) + "]";
    }
    if (cur.at < prev.at) return "timestamps decrease at history[" + std::to_string(i) + "]";
  }
  return std::nullopt;
}

}  // namespace rku
