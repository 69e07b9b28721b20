#pragma once

#include <optional>
#include <string>

#include "rku/domain.hpp"
#include "rku/notify.hpp"
#include "rku/store.hpp"

namespace rku {

struct OrderIntake {
  CustomerId customer_id;
  Division division = Division::Hardware;
  DeviceInfo device;
  std::string problem;
};

struct TransitionResult {
  ServiceOrder order;
  /// False when the request replayed a transition already applied.
  bool applied = true;
};

/// Order workflow shared by the HTTP API and the operator CLI, so both
/// issue notas and emit completion notifications the same way.
class ServiceDesk {
 public:
  ServiceDesk(Store& store, notify::Dispatcher& dispatcher, Clock clock);

  /// Throws Error(ForeignKeyViolation) for an unknown customer, Error(Validation).
  ServiceOrder create_order(const OrderIntake& intake, const std::string& actor);

  /// Applies one lifecycle step. With `expected_from` set, a request whose
  /// from->to step is already the order's last event is answered with the
  /// current order and no side effects. Entering Completed emits exactly
  /// one event before returning.
  /// Throws Error(NotFound), Error(InvalidTransition), Error(ClockSkew).
  TransitionResult change_status(const NotaNumber& nota, OrderStatus to, const std::string& actor,
                                 std::optional<std::string> note,
                                 std::optional<OrderStatus> expected_from = std::nullopt);

 private:
  Store& store_;
  notify::Dispatcher& dispatcher_;
  Clock clock_;
};

}  // namespace rku
