#include "rku/json_codec.hpp"

#include "rku/error.hpp"

namespace rku {

using nlohmann::json;

namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

std::optional<std::string> get_optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

void to_json(json& j, const Customer& c) {
  j = json{{"id", c.id},
           {"name", c.name},
           {"email", c.email},
           {"created_at", format_iso8601(c.created_at)}};
  put_optional(j, "phone", c.phone);
}

void from_json(const json& j, Customer& c) {
  c.id = j.at("id").get<std::string>();
  c.name = j.at("name").get<std::string>();
  c.email = j.at("email").get<std::string>();
  c.phone = get_optional_string(j, "phone");
  c.created_at = parse_iso8601(j.at("created_at").get<std::string>());
}

void to_json(json& j, const DeviceInfo& d) {
  j = json{{"category", to_string(d.category)}, {"brand", d.brand}, {"description", d.description}};
}

void from_json(const json& j, DeviceInfo& d) {
  d.category = parse_device_category(j.at("category").get<std::string>());
  d.brand = j.value("brand", std::string{});
  d.description = j.at("description").get<std::string>();
}

void to_json(json& j, const StatusEvent& e) {
  j = json{{"status", to_string(e.status)}, {"at", format_iso8601(e.at)}, {"actor", e.actor}};
  put_optional(j, "note", e.note);
}

void from_json(const json& j, StatusEvent& e) {
  e.status = parse_order_status(j.at("status").get<std::string>());
  e.at = parse_iso8601(j.at("at").get<std::string>());
  e.actor = j.at("actor").get<std::string>();
  e.note = get_optional_string(j, "note");
}

void to_json(json& j, const ServiceOrder& o) {
  j = json{
      {"nota", o.nota.str()}, {"customer_id", o.customer_id}, {"division", to_string(o.division)},
      {"device", o.device},   {"problem", o.problem},         {"history", o.history}};
}

ServiceOrder order_from_json(const json& j) {
  ServiceOrder o;
  o.nota = NotaNumber::parse(j.at("nota").get<std::string>());
  o.customer_id = j.at("customer_id").get<std::string>();
  o.division = parse_division(j.at("division").get<std::string>());
  o.device = j.at("device").get<DeviceInfo>();
  o.problem = j.at("problem").get<std::string>();
  o.history = j.at("history").get<std::vector<StatusEvent>>();
  return o;
}

void to_json(json& j, const Complaint& c) {
  j = json{{"id", c.id},
           {"customer_id", c.customer_id},
           {"nota", c.nota ? json(c.nota->str()) : json(nullptr)},
           {"text", c.text},
           {"created_at", format_iso8601(c.created_at)},
           {"state", to_string(c.state)}};
}

void from_json(const json& j, Complaint& c) {
  c.id = j.at("id").get<std::string>();
  c.customer_id = j.at("customer_id").get<std::string>();
  if (auto nota = get_optional_string(j, "nota")) {
    c.nota = NotaNumber::parse(*nota);
  } else {
    c.nota.reset();
  }
  c.text = j.at("text").get<std::string>();
  c.created_at = parse_iso8601(j.at("created_at").get<std::string>());
  c.state = parse_complaint_state(j.at("state").get<std::string>());
}

void to_json(json& j, const FaqEntry& f) {
  j = json{{"id", f.id}, {"question", f.question}, {"answer", f.answer}, {"tags", f.tags}};
}

void from_json(const json& j, FaqEntry& f) {
  f.id = j.at("id").get<std::string>();
  f.question = j.at("question").get<std::string>();
  f.answer = j.at("answer").get<std::string>();
  f.tags = j.value("tags", std::vector<std::string>{});
}

void to_json(json& j, const Account& a) {
  j = json{{"account_id", a.account_id},
           {"email", a.email},
           {"display_name", a.display_name},
           {"role", to_string(a.role)},
           {"password_digest", a.password_digest}};
}

void from_json(const json& j, Account& a) {
  a.account_id = j.at("account_id").get<std::string>();
  a.email = j.at("email").get<std::string>();
  a.display_name = j.value("display_name", std::string{});
  a.role = parse_role(j.at("role").get<std::string>());
  a.password_digest = j.at("password_digest").get<std::string>();
}

}  // namespace rku
