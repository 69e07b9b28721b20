#include "rku/service_desk.hpp"

#include "rku/error.hpp"

namespace rku {

ServiceDesk::ServiceDesk(Store& store, notify::Dispatcher& dispatcher, Clock clock)
    : store_(store), dispatcher_(dispatcher), clock_(std::move(clock)) {}

ServiceOrder ServiceDesk::create_order(const OrderIntake& intake, const std::string& actor) {
  const auto now = clock_();
  // Validate before a sequence number is spent.
  ServiceOrder order =
      new_order(intake.customer_id, intake.division, intake.device, intake.problem, actor, now);
  if (!store_.find_customer(intake.customer_id)) {
    throw Error(ErrorCode::ForeignKeyViolation, "unknown customer: " + intake.customer_id);
  }
  order.nota = store_.issue_nota(date_of(now));
  store_.save_order(order);
  return order;
}

TransitionResult ServiceDesk::change_status(const NotaNumber& nota, OrderStatus to,
                                            const std::string& actor,
                                            std::optional<std::string> note,
                                            std::optional<OrderStatus> expected_from) {
  const auto now = clock_();
  bool applied = false;
  auto updated = store_.update_order(nota, [&](const ServiceOrder& current) {
    if (expected_from && current.status() != *expected_from) {
      const auto& h = current.history;
      const bool replay =
          h.size() >= 2 && h[h.size() - 2].status == *expected_from && h.back().status == to;
      if (replay) return current;
      throw Error(ErrorCode::InvalidTransition,
                  "order " + nota.str() + " is at " + std::string(to_string(current.status())) +
                      ", not " + std::string(to_string(*expected_from)));
    }
    applied = true;
    return transition(current, to, actor, note, now);
  });
  if (!updated) throw Error(ErrorCode::NotFound, "no order with nota " + nota.str());

  if (applied && to == OrderStatus::Completed) {
    auto customer = store_.find_customer(updated->customer_id);
    if (customer) dispatcher_.emit(notify::completion_event(*updated, *customer, now));
  }
  return TransitionResult{std::move(*updated), applied};
}

}  // namespace rku
