#include <doctest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "random_store.hpp"
#include "rku/error.hpp"
#include "rku/store.hpp"

using namespace rku;
using rku::testing::t0;
using rku::testing::TempDir;

namespace {

const Date kDay{std::chrono::year{2016}, std::chrono::month{5}, std::chrono::day{20}};

Customer customer(std::string name, std::string email) {
  Customer c;
  c.name = std::move(name);
  c.email = std::move(email);
  c.created_at = t0();
  return c;
}

ServiceOrder order_for(Store& store, const CustomerId& id) {
  auto o = new_order(id, Division::Hardware, DeviceInfo{DeviceCategory::Computer, "Acer", "laptop"},
                     "no power", "staff1", t0());
  o.nota = store.issue_nota(kDay);
  return o;
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

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("a missing directory opens as an empty store") {
  TempDir dir;
  Store store(dir / "absent");
  CHECK(store.snapshot() == StoreSnapshot{});
  CHECK_FALSE(std::filesystem::exists(dir / "absent"));
}

TEST_CASE("issue_nota counts per date and survives reopening") {
  TempDir dir;
  const Date next_day{std::chrono::year{2016}, std::chrono::month{5}, std::chrono::day{21}};
  {
    Store store(dir.path());
    CHECK(store.issue_nota(kDay).str() == "RKU-20160520-0001");
    CHECK(store.issue_nota(kDay).str() == "RKU-20160520-0002");
    CHECK(store.issue_nota(next_day).str() == "RKU-20160521-0001");
  }
  Store reopened(dir.path());
  CHECK(reopened.issue_nota(kDay).str() == "RKU-20160520-0003");
  std::ifstream in(dir / "counters.json");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.find("\"20160520\": 3") != std::string::npos);
}

TEST_CASE("customers: ids, case-folded email lookup and duplicates") {
  TempDir dir;
  Store store(dir.path());
  const auto a = store.save_customer(customer("Budi", "a@x.com"));
  CHECK(a.id == "CUST-0001");
  const auto b = store.save_customer(customer("Siti", "b@x.com"));
  CHECK(b.id == "CUST-0002");
  REQUIRE(store.find_customer_by_email("A@x.COM").has_value());
  CHECK(store.find_customer_by_email("A@x.COM")->id == "CUST-0001");
  CHECK_FALSE(store.find_customer_by_email("nobody@x.com").has_value());
  CHECK(code_of([&] { store.save_customer(customer("Dup", "A@X.com")); }) ==
        ErrorCode::DuplicateEmail);
  CHECK(code_of([&] { store.save_customer(customer("  ", "c@x.com")); }) == ErrorCode::Validation);
  CHECK(code_of([&] { store.save_customer(customer("C", "not-an-email")); }) ==
        ErrorCode::Validation);

  // Replacing by id keeps the email slot.
  auto renamed = a;
  renamed.name = "Budi S.";
  CHECK(store.save_customer(renamed).name == "Budi S.");
  CHECK(store.list_customers().size() == 2);
}

TEST_CASE("orders: insert, lookup, duplicates and foreign keys") {
  TempDir dir;
  Store store(dir.path());
  const auto c = store.save_customer(customer("Budi", "a@x.com"));
  const auto o = order_for(store, c.id);
  store.save_order(o);
  CHECK(store.find_order_by_nota(o.nota) == std::optional<ServiceOrder>(o));
  CHECK_FALSE(store.find_order_by_nota(NotaNumber(kDay, 99)).has_value());
  CHECK(code_of([&] { store.save_order(o); }) == ErrorCode::DuplicateNota);

  auto orphan = order_for(store, "CUST-9999");
  CHECK(code_of([&] { store.save_order(orphan); }) == ErrorCode::ForeignKeyViolation);

  auto unissued = o;
  unissued.nota = NotaNumber(kDay, 500);
  CHECK(code_of([&] { store.save_order(unissued); }) == ErrorCode::Validation);

  CHECK(store.list_orders_by_customer(c.id).size() == 1);
  CHECK(store.list_orders_by_customer("CUST-0002").empty());
}

TEST_CASE("update_order applies the callback atomically and validates the result") {
  TempDir dir;
  Store store(dir.path());
  const auto c = store.save_customer(customer("Budi", "a@x.com"));
  const auto o = order_for(store, c.id);
  store.save_order(o);

  auto updated = store.update_order(o.nota, [](const ServiceOrder& cur) {
    return transition(cur, OrderStatus::Diagnosing, "staff", std::nullopt, t0());
  });
  REQUIRE(updated.has_value());
  CHECK(updated->status() == OrderStatus::Diagnosing);
  CHECK(store.find_order_by_nota(o.nota)->status() == OrderStatus::Diagnosing);

  CHECK_FALSE(store.update_order(NotaNumber(kDay, 42), [](const ServiceOrder& x) { return x; }));
  CHECK(code_of([&] {
          store.update_order(o.nota, [](ServiceOrder cur) {
            cur.history.push_back(StatusEvent{OrderStatus::PickedUp, t0(), "x", std::nullopt});
            return cur;
          });
        }) == ErrorCode::Validation);
  CHECK(store.find_order_by_nota(o.nota)->history.size() == 2);
}

TEST_CASE("complaints: foreign keys, state filter and state changes") {
  TempDir dir;
  Store store(dir.path());
  const auto c = store.save_customer(customer("Budi", "a@x.com"));
  const auto o = order_for(store, c.id);
  store.save_order(o);

  Complaint with_nota{"", c.id, o.nota, "lama sekali", t0(), ComplaintState::Open};
  CHECK(store.append_complaint(with_nota).id == "CMP-0001");
  Complaint plain{"", c.id, std::nullopt, "pelayanan lambat", t0(), ComplaintState::Open};
  CHECK(store.append_complaint(plain).id == "CMP-0002");

  Complaint bad_nota{"", c.id, NotaNumber(kDay, 77), "??", t0(), ComplaintState::Open};
  CHECK(code_of([&] { store.append_complaint(bad_nota); }) == ErrorCode::ForeignKeyViolation);
  Complaint bad_customer{"", "CUST-0404", std::nullopt, "x", t0(), ComplaintState::Open};
  CHECK(code_of([&] { store.append_complaint(bad_customer); }) == ErrorCode::ForeignKeyViolation);
  Complaint empty{"", c.id, std::nullopt, "  ", t0(), ComplaintState::Open};
  CHECK(code_of([&] { store.append_complaint(empty); }) == ErrorCode::Validation);

  CHECK(store.set_complaint_state("CMP-0002", ComplaintState::Acknowledged).state ==
        ComplaintState::Acknowledged);
  CHECK(store.list_complaints(ComplaintState::Open).size() == 1);
  CHECK(store.list_complaints(ComplaintState::Acknowledged).at(0).id == "CMP-0002");
  CHECK(store.list_complaints().size() == 2);
  CHECK(code_of([&] { store.set_complaint_state("CMP-0404", ComplaintState::Resolved); }) ==
        ErrorCode::NotFound);
}

TEST_CASE("faq upsert assigns ids and replaces by id") {
  TempDir dir;
  Store store(dir.path());
  auto first = store.upsert_faq(FaqEntry{"", "Berapa lama?", "Dua hari.", {"durasi"}});
  CHECK(first.id == "FAQ-0001");
  first.answer = "Tiga hari.";
  store.upsert_faq(first);
  CHECK(store.list_faq().size() == 1);
  CHECK(store.list_faq()[0].answer == "Tiga hari.");
  CHECK(code_of([&] { store.upsert_faq(FaqEntry{"", "q", " ", {}}); }) == ErrorCode::Validation);
}

TEST_CASE("open reports truncated and inconsistent files as CorruptStore") {
  TempDir dir;
  {
    Store store(dir.path());
    const auto c = store.save_customer(customer("Budi", "a@x.com"));
    store.save_order(order_for(store, c.id));
  }
  SUBCASE("truncated orders file") {
    std::ifstream in(dir / "orders.json");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    write_text(dir / "orders.json", text.substr(0, text.size() / 2));
    CHECK(code_of([&] { Store s(dir.path()); }) == ErrorCode::CorruptStore);
  }
  SUBCASE("order referencing a missing customer") {
    write_text(dir / "customers.json", "[]");
    try {
      Store s(dir.path());
      FAIL("expected CorruptStore");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptStore);
      CHECK(std::string(e.what()).find("RKU-20160520-0001") != std::string::npos);
    }
  }
  SUBCASE("counter behind an issued nota") {
    write_text(dir / "counters.json", "{\"20160520\": 0}");
    CHECK(code_of([&] { Store s(dir.path()); }) == ErrorCode::CorruptStore);
  }
  SUBCASE("a record with a bad field names its index") {
    write_text(dir / "faq.json", R"([{"id":"FAQ-0001","question":"q","answer":"a"},{"id":3}])");
    try {
      Store s(dir.path());
      FAIL("expected CorruptStore");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("faq.json[1]") != std::string::npos);
    }
  }
}

TEST_CASE("a failure between temp write and rename keeps the previous snapshot") {
  TempDir dir;
  StoreSnapshot before;
  {
    Store store(dir.path());
    const auto c = store.save_customer(customer("Budi", "a@x.com"));
    store.save_order(order_for(store, c.id));
    before = store.snapshot();

    store.set_commit_hook([](const std::filesystem::path& p) {
      if (p.filename() == "orders.json") throw std::runtime_error("simulated crash");
    });
    const auto second = order_for(store, c.id);
    CHECK_THROWS_AS(store.save_order(second), std::runtime_error);
    // The in-memory view did not take the failed write either.
    CHECK(store.snapshot().orders == before.orders);
  }
  CHECK(std::filesystem::exists(dir / "orders.json.tmp"));
  Store reopened(dir.path());
  const auto after = reopened.snapshot();
  CHECK(after.orders == before.orders);
  CHECK(after.customers == before.customers);
  // The consumed sequence number is not handed out again.
  CHECK(reopened.issue_nota(kDay).sequence() == 3);
}

TEST_CASE("random stores survive a reopen unchanged") {
  std::mt19937 rng(2016);
  for (int i = 0; i < 40; ++i) {
    TempDir dir;
    StoreSnapshot written;
    {
      Store store(dir.path());
      rku::testing::populate_random(store, rng);
      written = store.snapshot();
    }
    Store reopened(dir.path());
    CHECK(reopened.snapshot() == written);
  }
}
