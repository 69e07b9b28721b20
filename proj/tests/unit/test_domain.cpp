#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "rku/domain.hpp"
#include "rku/error.hpp"

using namespace rku;
using rku::testing::t0;

namespace {

ServiceOrder printer_order() {
  return new_order("CUST-0001", Division::Printer,
                   DeviceInfo{DeviceCategory::Printer, "Epson", "paper jam"}, "won't feed",
                   "staff1", t0());
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an rku::Error");
  return ErrorCode::Validation;
}

}  // namespace

TEST_CASE("new_order starts the history at Received") {
  const auto order = printer_order();
  REQUIRE(order.history.size() == 1);
  CHECK(order.history[0] == StatusEvent{OrderStatus::Received, t0(), "staff1", std::nullopt});
  CHECK(order.status() == OrderStatus::Received);
  CHECK(order.division == Division::Printer);
  CHECK_FALSE(check_order_invariants(order).has_value());
}

TEST_CASE("new_order rejects blank problems and the Marketing division") {
  CHECK(code_of([] { parse_division("Marketing"); }) == ErrorCode::Validation);
  CHECK(code_of([] {
          new_order("CUST-0001", Division::Hardware,
                    DeviceInfo{DeviceCategory::Computer, "Acer", "laptop"}, "   ", "staff1", t0());
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          new_order("CUST-0001", static_cast<Division>(7),
                    DeviceInfo{DeviceCategory::Computer, "Acer", "laptop"}, "dead", "staff1", t0());
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          new_order("CUST-0001", Division::Hardware,
                    DeviceInfo{DeviceCategory::Computer, "Acer", " "}, "dead", "staff1", t0());
        }) == ErrorCode::Validation);
}

TEST_CASE("transition follows table entries and leaves the input untouched") {
  const auto received = printer_order();
  const auto diagnosing =
      transition(received, OrderStatus::Diagnosing, "staff1", "checking rollers", t0());
  CHECK(diagnosing.status() == OrderStatus::Diagnosing);
  CHECK(diagnosing.history.size() == 2);
  CHECK(diagnosing.history.back().note == std::optional<std::string>("checking rollers"));
  CHECK(received.history.size() == 1);
}

TEST_CASE("transition rejects missing edges, terminal states and clock skew") {
  auto order = printer_order();
  for (auto s : {OrderStatus::Diagnosing, OrderStatus::InRepair, OrderStatus::Completed}) {
    order = transition(order, s, "staff1", std::nullopt, t0());
  }
  CHECK(code_of([&] { transition(order, OrderStatus::InRepair, "s", std::nullopt, t0()); }) ==
        ErrorCode::InvalidTransition);

  const auto picked = transition(order, OrderStatus::PickedUp, "s", std::nullopt, t0());
  for (auto s : kAllStatuses) {
    CHECK(code_of([&] { transition(picked, s, "s", std::nullopt, t0()); }) ==
          ErrorCode::InvalidTransition);
  }

  const auto later = transition(printer_order(), OrderStatus::Diagnosing, "s", std::nullopt,
                                t0() + std::chrono::hours(1));
  CHECK(code_of([&] { transition(later, OrderStatus::InRepair, "s", std::nullopt, t0()); }) ==
        ErrorCode::ClockSkew);
}

TEST_CASE("legal_transitions lists exactly the table successors") {
  using S = OrderStatus;
  auto as_set = [](std::vector<S> v) { return std::set<S>(v.begin(), v.end()); };
  CHECK(as_set(legal_transitions(S::Received)) == std::set<S>{S::Diagnosing, S::Cancelled});
  CHECK(as_set(legal_transitions(S::Diagnosing)) ==
        std::set<S>{S::InRepair, S::AwaitingParts, S::Cancelled});
  CHECK(as_set(legal_transitions(S::AwaitingParts)) == std::set<S>{S::InRepair, S::Cancelled});
  CHECK(as_set(legal_transitions(S::InRepair)) ==
        std::set<S>{S::Completed, S::AwaitingParts, S::Cancelled});
  CHECK(as_set(legal_transitions(S::Completed)) == std::set<S>{S::PickedUp});
  CHECK(legal_transitions(S::PickedUp).empty());
  CHECK(legal_transitions(S::Cancelled).empty());
}

TEST_CASE("random walks keep every order invariant") {
  std::mt19937 rng(20160520);
  for (int walk = 0; walk < 200; ++walk) {
    auto order = printer_order();
    auto now = t0();
    while (!is_terminal(order.status())) {
      const auto next = legal_transitions(order.status());
      std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
      now += std::chrono::minutes(std::uniform_int_distribution<int>(0, 90)(rng));
      order = transition(order, next[pick(rng)], "staff", std::nullopt, now);
      REQUIRE_FALSE(check_order_invariants(order).has_value());
    }
    CHECK(legal_transitions(order.status()).empty());
  }
}

TEST_CASE("check_order_invariants reports broken histories") {
  auto order = printer_order();
  order.history.push_back(StatusEvent{OrderStatus::Completed, t0(), "x", std::nullopt});
  CHECK(check_order_invariants(order).has_value());

  auto skewed = transition(printer_order(), OrderStatus::Diagnosing, "x", std::nullopt, t0());
  skewed.history.back().at = t0() - std::chrono::seconds(1);
  CHECK(check_order_invariants(skewed).has_value());

  auto wrong_start = printer_order();
  wrong_start.history.front().status = OrderStatus::Diagnosing;
  CHECK(check_order_invariants(wrong_start).has_value());
}

TEST_CASE("nota formatting and parsing") {
  const Date d{std::chrono::year{2016}, std::chrono::month{5}, std::chrono::day{20}};
  CHECK(format_nota(d, 7).str() == "RKU-20160520-0007");
  const auto parsed = parse_nota("RKU-20160520-0007");
  CHECK(parsed.date() == d);
  CHECK(parsed.sequence() == 7);

  for (const char* bad : {"RKU-2016-07", "RKU-20160520-0000", "RKU-20160230-0001",
                          "rku-20160520-0001", "RKU-20160520-00a1", "RKU-20160520-00001", ""}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_nota(bad); }) == ErrorCode::MalformedNota);
  }
  CHECK(code_of([&] { format_nota(d, 0); }) == ErrorCode::MalformedNota);
  CHECK(code_of([&] { format_nota(d, 10000); }) == ErrorCode::MalformedNota);
}

TEST_CASE("parse(format(d, s)) is the identity") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> day_offset(0, 365 * 40);
  std::uniform_int_distribution<int> seq(1, NotaNumber::kMaxSequence);
  const auto base = std::chrono::sys_days{
      Date{std::chrono::year{2000}, std::chrono::month{1}, std::chrono::day{1}}};
  for (int i = 0; i < 500; ++i) {
    const Date d{base + std::chrono::days{day_offset(rng)}};
    const int s = seq(rng);
    const auto text = format_nota(d, s).str();
    const auto back = parse_nota(text);
    CHECK(back.date() == d);
    CHECK(back.sequence() == s);
    CHECK(back.str() == text);
  }
}

TEST_CASE("email helpers") {
  CHECK(normalize_email("  A@X.COM ") == "a@x.com");
  CHECK(is_valid_email("a@x.com"));
  CHECK_FALSE(is_valid_email("a@x"));
  CHECK_FALSE(is_valid_email("@x.com"));
  CHECK_FALSE(is_valid_email("a b@x.com"));
  CHECK_FALSE(is_valid_email("a@@x.com"));
  CHECK_FALSE(is_valid_email("a@x.com."));
}

TEST_CASE("timestamps round-trip as ISO-8601 UTC seconds") {
  const auto t = make_timestamp(2016, 5, 20, 23, 59, 7);
  CHECK(format_iso8601(t) == "2016-05-20T23:59:07Z");
  CHECK(parse_iso8601("2016-05-20T23:59:07Z") == t);
  CHECK(code_of([] { parse_iso8601("2016-05-20 23:59:07"); }) == ErrorCode::Validation);
  CHECK(code_of([] { parse_iso8601("2016-02-30T00:00:00Z"); }) == ErrorCode::Validation);
}
