#pragma once

#include <random>
#include <string>

#include "fixtures.hpp"
#include "rku/domain.hpp"
#include "rku/store.hpp"

namespace rku::testing {

inline std::string random_text(std::mt19937& rng, std::size_t max_len) {
  static const std::vector<std::string> pieces{"a",  "Z",  "9",  " ",  "é", "ß",
                                               "日", "\"", "\\", "\n", "?"};
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string s = "x";
  for (std::size_t n = len(rng); n > 0; --n) s += pieces[pick(rng)];
  return s;
}

/// Fills a store through its public API with random but valid records.
inline void populate_random(Store& store, std::mt19937& rng) {
  std::uniform_int_distribution<int> count(0, 6);
  std::bernoulli_distribution coin(0.5);
  const auto base = t0();

  std::vector<CustomerId> ids;
  const int customers = count(rng) + 1;
  for (int i = 0; i < customers; ++i) {
    Customer c;
    c.name = random_text(rng, 12);
    c.email = "user" + std::to_string(i) + "@example.com";
    if (coin(rng)) c.phone = "0711-" + std::to_string(rng() % 100000);
    c.created_at = base + std::chrono::seconds(rng() % 100000);
    ids.push_back(store.save_customer(c).id);
  }

  std::vector<NotaNumber> notas;
  std::uniform_int_distribution<int> day(0, 3);
  for (int i = 0, n = count(rng); i < n; ++i) {
    const auto at = base + std::chrono::hours(24 * day(rng));
    auto order = new_order(ids[rng() % ids.size()], static_cast<Division>(rng() % 3),
                           DeviceInfo{static_cast<DeviceCategory>(rng() % 3), random_text(rng, 5),
                                      random_text(rng, 10)},
                           random_text(rng, 20), "staff", at);
    order.nota = store.issue_nota(date_of(at));
    auto now = at;
    for (int steps = static_cast<int>(rng() % 5); steps > 0 && !is_terminal(order.status());
         --steps) {
      const auto next = legal_transitions(order.status());
      now += std::chrono::minutes(rng() % 300);
      std::optional<std::string> note;
      if (coin(rng)) note = random_text(rng, 8);
      order = transition(order, next[rng() % next.size()], "ACC-0001", note, now);
    }
    store.save_order(order);
    notas.push_back(order.nota);
  }

  for (int i = 0, n = count(rng); i < n; ++i) {
    Complaint c;
    c.customer_id = ids[rng() % ids.size()];
    if (!notas.empty() && coin(rng)) c.nota = notas[rng() % notas.size()];
    c.text = random_text(rng, 30);
    c.created_at = base + std::chrono::seconds(rng() % 100000);
    const auto saved = store.append_complaint(c);
    if (coin(rng)) store.set_complaint_state(saved.id, static_cast<ComplaintState>(rng() % 3));
  }

  for (int i = 0, n = count(rng); i < n; ++i) {
    FaqEntry f;
    f.question = random_text(rng, 20);
    f.answer = random_text(rng, 40);
    for (int t = static_cast<int>(rng() % 3); t > 0; --t) f.tags.push_back(random_text(rng, 4));
    store.upsert_faq(f);
  }

  for (int i = 0, n = count(rng) % 3; i < n; ++i) {
    Account a;
    a.email = "staff" + std::to_string(i) + "@example.com";
    a.display_name = random_text(rng, 8);
    a.role = coin(rng) ? Role::Staff : Role::Admin;
    a.password_digest = "$argon2id$v=19$m=8,t=1,p=1$" + std::to_string(rng());
    store.save_account(a);
  }
}

}  // namespace rku::testing
