#include "rku/api.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>

#include "rku/error.hpp"
#include "rku/json_codec.hpp"

namespace rku::api {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::MalformedNota:
    case ErrorCode::EmptyQuery:
    case ErrorCode::BadRequest:
    case ErrorCode::WeakPassword: return 400;
    case ErrorCode::AuthenticationFailed:
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::Forbidden: return 403;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidTransition:
    case ErrorCode::ClockSkew:
    case ErrorCode::DuplicateEmail:
    case ErrorCode::DuplicateNota: return 409;
    case ErrorCode::ForeignKeyViolation: return 422;
    case ErrorCode::LockedOut: return 429;
    case ErrorCode::StoreLocked: return 503;
    case ErrorCode::CorruptStore:
    case ErrorCode::StorageFailure: return 500;
  }
  return 500;
}

namespace {

constexpr const char* kJson = "application/json";

json error_body(int status, std::string_view code, const std::string& message) {
  return json{{"status", status}, {"code", code}, {"message", message}};
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  const int status = http_status(e.code());
  // Storage internals stay out of responses.
  const std::string message = status >= 500 ? "internal storage error" : e.what();
  send(res, status, error_body(status, to_string(e.code()), message));
}

std::string_view default_code(int status) {
  switch (status) {
    case 400: return "BAD_REQUEST";
    case 401: return "UNAUTHORIZED";
    case 403: return "FORBIDDEN";
    case 404: return "NOT_FOUND";
    case 405: return "METHOD_NOT_ALLOWED";
    case 413: return "PAYLOAD_TOO_LARGE";
    default: return status >= 500 ? "INTERNAL_ERROR" : "HTTP_ERROR";
  }
}

json parse_body(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
    return j;
  } catch (const json::exception&) {
    throw Error(ErrorCode::BadRequest, "request body is not valid JSON");
  }
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::BadRequest, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::BadRequest, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return {};
  return header.substr(prefix.size());
}

std::size_t parse_count(const std::string& text, const char* name, std::size_t max) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || value > max) {
    throw Error(ErrorCode::Validation, std::string("invalid ") + name + ": " + text);
  }
  return value;
}

NotaNumber path_nota(const httplib::Request& req) {
  return NotaNumber::parse(req.matches[1].str());
}

json order_view(const ServiceOrder& order) {
  json j = order;
  j["status"] = to_string(order.status());
  json next = json::array();
  for (auto s : legal_transitions(order.status())) next.push_back(to_string(s));
  j["legal_transitions"] = std::move(next);
  return j;
}

template <class T, class Fn>
json capped_list(const std::vector<T>& items, Fn&& view) {
  json arr = json::array();
  for (std::size_t i = 0; i < items.size() && i < kListCap; ++i) arr.push_back(view(items[i]));
  return arr;
}

bool forward_complaint_step(ComplaintState from, ComplaintState to) {
  return static_cast<int>(to) > static_cast<int>(from);
}

void require_staff(const auth::Principal& p) {
  if (!p.is_staff()) throw Error(ErrorCode::Forbidden, "staff access required");
}

void require_customer(const auth::Principal& p) {
  if (p.role != Role::Customer) throw Error(ErrorCode::Forbidden, "customer access required");
}

}  // namespace

ApiServer::ApiServer(Store& store, auth::AuthService& auth, notify::Dispatcher& dispatcher,
                     Clock clock, std::optional<std::filesystem::path> static_dir)
    : store_(store),
      auth_(auth),
      dispatcher_(dispatcher),
      clock_(clock),
      desk_(store, dispatcher, clock),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
  if (static_dir) server_->set_mount_point("/", static_dir->string());
}

ApiServer::~ApiServer() { stop(); }

std::shared_ptr<const fuzzy::SearchCorpus> ApiServer::corpus_for(const std::vector<FaqEntry>& faq) {
  std::lock_guard lock(corpus_mutex_);
  if (!corpus_ || faq != corpus_faq_) {
    std::vector<fuzzy::SearchCorpus::Source> sources;
    for (const auto& f : faq) sources.push_back({f.id, f.question});
    corpus_ = std::make_shared<const fuzzy::SearchCorpus>(std::move(sources));
    corpus_faq_ = faq;
  }
  return corpus_;
}

int ApiServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::StorageFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  return bound;
}

void ApiServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::StorageFailure, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ApiServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

void ApiServer::install_routes() {
  auto& srv = *server_;
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  // Every route funnels failures through one translation to ApiError bodies.
  auto guarded = [](Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception&) {
        send(res, 400, error_body(400, "BAD_REQUEST", "malformed request"));
      } catch (const std::exception&) {
        send(res, 500, error_body(500, "INTERNAL_ERROR", "internal error"));
      }
    };
  };
  auto who = [this](const httplib::Request& req) { return auth_.authenticate(bearer_token(req)); };

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send(res, res.status, error_body(res.status, default_code(res.status), "request failed"));
    return httplib::Server::HandlerResponse::Handled;
  });
  srv.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        send(res, 500, error_body(500, "INTERNAL_ERROR", "internal error"));
      });

  srv.Post("/api/login", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             const auto email = required_string(body, "email");
             const auto password = required_string(body, "password");
             const auto session = auth_.login(email, password);
             json out{{"token", session.token},
                      {"expires_at", format_iso8601(session.expires_at)},
                      {"role", to_string(session.role)},
                      {"customer", nullptr}};
             if (session.role == Role::Customer) {
               if (auto c = store_.find_customer(session.account_id)) out["customer"] = *c;
             } else if (auto a = store_.find_account(session.account_id)) {
               out["account"] =
                   json{{"id", a->account_id}, {"name", a->display_name}, {"email", a->email}};
             }
             send(res, 200, out);
           }));

  srv.Post("/api/logout", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
             who(req);
             auth_.logout(bearer_token(req));
             send(res, 200, json{{"ok", true}});
           }));

  srv.Post("/api/password", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             auth_.change_password(bearer_token(req), required_string(body, "old_password"),
                                   required_string(body, "new_password"));
             send(res, 200, json{{"ok", true}});
           }));

  srv.Post("/api/customers", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto token = bearer_token(req);
             const auto caller = auth_.authenticate(token);
             if (caller.role != Role::Admin)
               throw Error(ErrorCode::Forbidden, "admin access required");
             const json body = parse_body(req);
             auto customer = auth_.register_customer(
                 token, required_string(body, "name"), required_string(body, "email"),
                 optional_string(body, "phone"), required_string(body, "password"));
             send(res, 201, json(customer));
           }));

  srv.Get("/api/customers",
          guarded([this, who](const httplib::Request& req, httplib::Response& res) {
            require_staff(who(req));
            send(res, 200,
                 json{{"customers", capped_list(store_.list_customers(),
                                                [](const Customer& c) { return json(c); })}});
          }));

  srv.Get(
      "/api/my/orders", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
        const auto caller = who(req);
        require_customer(caller);
        send(res, 200,
             json{{"orders",
                   capped_list(store_.list_orders_by_customer(caller.account_id), order_view)}});
      }));

  srv.Get("/api/orders", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
            require_staff(who(req));
            send(res, 200, json{{"orders", capped_list(store_.list_orders(), order_view)}});
          }));

  srv.Get(R"(/api/orders/([^/]+))",
          guarded([this, who](const httplib::Request& req, httplib::Response& res) {
            const auto caller = who(req);
            const auto nota = path_nota(req);
            auto order = store_.find_order_by_nota(nota);
            if (!order) throw Error(ErrorCode::NotFound, "no order with nota " + nota.str());
            if (!caller.is_staff() && order->customer_id != caller.account_id) {
              throw Error(ErrorCode::Forbidden, "this order belongs to another customer");
            }
            send(res, 200, order_view(*order));
          }));

  srv.Post("/api/orders", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
             const auto caller = who(req);
             require_staff(caller);
             const json body = parse_body(req);
             OrderIntake intake;
             intake.customer_id = required_string(body, "customer_id");
             intake.division = parse_division(required_string(body, "division"));
             auto device = body.find("device");
             if (device == body.end() || !device->is_object()) {
               throw Error(ErrorCode::BadRequest, "field 'device' must be an object");
             }
             intake.device.category = parse_device_category(required_string(*device, "category"));
             intake.device.brand = optional_string(*device, "brand").value_or("");
             intake.device.description = required_string(*device, "description");
             intake.problem = required_string(body, "problem");
             if (!store_.find_customer(intake.customer_id)) {
               throw Error(ErrorCode::ForeignKeyViolation,
                           "unknown customer: " + intake.customer_id);
             }
             send(res, 201, order_view(desk_.create_order(intake, caller.account_id)));
           }));

  srv.Post(R"(/api/orders/([^/]+)/status)",
           guarded([this, who](const httplib::Request& req, httplib::Response& res) {
             const auto caller = who(req);
             require_staff(caller);
             const auto nota = path_nota(req);
             const json body = parse_body(req);
             const auto to = parse_order_status(required_string(body, "status"));
             std::optional<OrderStatus> from;
             if (auto f = optional_string(body, "from")) from = parse_order_status(*f);
             auto result = desk_.change_status(nota, to, caller.account_id,
                                               optional_string(body, "note"), from);
             send(res, 200, order_view(result.order));
           }));

  srv.Post(
      "/api/complaints", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
        const auto caller = who(req);
        require_customer(caller);
        const json body = parse_body(req);
        Complaint c;
        c.customer_id = caller.account_id;
        c.text = required_string(body, "text");
        if (trim(c.text).empty())
          throw Error(ErrorCode::Validation, "complaint text must not be empty");
        if (auto nota_text = optional_string(body, "nota")) {
          const auto not_owned =
              Error(ErrorCode::ForeignKeyViolation, "nota does not refer to one of your orders");
          std::optional<NotaNumber> nota;
          try {
            nota = NotaNumber::parse(*nota_text);
          } catch (const Error&) {
            throw not_owned;
          }
          auto order = store_.find_order_by_nota(*nota);
          if (!order || order->customer_id != caller.account_id) throw not_owned;
          c.nota = nota;
        }
        c.created_at = clock_();
        c.state = ComplaintState::Open;
        send(res, 201, json(store_.append_complaint(std::move(c))));
      }));

  srv.Get(
      "/api/my/complaints",
      guarded([this, who](const httplib::Request& req, httplib::Response& res) {
        const auto caller = who(req);
        require_customer(caller);
        auto all = store_.list_complaints();
        std::vector<Complaint> mine;
        std::copy_if(all.rbegin(), all.rend(), std::back_inserter(mine),
                     [&](const Complaint& c) { return c.customer_id == caller.account_id; });
        send(res, 200,
             json{{"complaints", capped_list(mine, [](const Complaint& c) { return json(c); })}});
      }));

  srv.Get(
      "/api/complaints", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
        require_staff(who(req));
        std::optional<ComplaintState> state;
        if (req.has_param("state") && !req.get_param_value("state").empty()) {
          state = parse_complaint_state(req.get_param_value("state"));
        }
        auto list = store_.list_complaints(state);
        std::reverse(list.begin(), list.end());  // newest first
        send(res, 200,
             json{{"complaints", capped_list(list, [](const Complaint& c) { return json(c); })}});
      }));

  srv.Post(R"(/api/complaints/([^/]+)/state)",
           guarded([this, who](const httplib::Request& req, httplib::Response& res) {
             require_staff(who(req));
             const std::string id = req.matches[1].str();
             const json body = parse_body(req);
             const auto to = parse_complaint_state(required_string(body, "state"));
             auto current = store_.find_complaint(id);
             if (!current) throw Error(ErrorCode::NotFound, "unknown complaint: " + id);
             if (!forward_complaint_step(current->state, to)) {
               throw Error(ErrorCode::InvalidTransition,
                           "complaint cannot move from " + std::string(to_string(current->state)) +
                               " to " + std::string(to_string(to)));
             }
             send(res, 200, json(store_.set_complaint_state(id, to)));
           }));

  srv.Get("/api/faq", guarded([this](const httplib::Request&, httplib::Response& res) {
            send(res, 200, json{{"entries", capped_list(store_.list_faq(), [](const FaqEntry& f) {
                                   return json(f);
                                 })}});
          }));

  srv.Post("/api/faq", guarded([this, who](const httplib::Request& req, httplib::Response& res) {
             require_staff(who(req));
             const json body = parse_body(req);
             FaqEntry entry;
             entry.question = required_string(body, "question");
             entry.answer = required_string(body, "answer");
             if (body.contains("tags")) entry.tags = body["tags"].get<std::vector<std::string>>();
             auto saved = store_.upsert_faq(std::move(entry));
             send(res, 201, json(saved));
           }));

  srv.Get("/api/faq/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("q"))
              throw Error(ErrorCode::BadRequest, "query parameter 'q' is required");
            std::size_t limit = kDefaultSuggestionLimit;
            if (req.has_param("limit"))
              limit = parse_count(req.get_param_value("limit"), "limit", kListCap);
            std::optional<std::size_t> max_distance;
            if (req.has_param("max_distance")) {
              max_distance = parse_count(req.get_param_value("max_distance"), "max_distance", 1000);
            }
            const auto faq = store_.list_faq();
            const auto hits =
                fuzzy::suggest(req.get_param_value("q"), *corpus_for(faq), limit, max_distance);
            json arr = json::array();
            for (const auto& s : hits) {
              auto entry = std::find_if(faq.begin(), faq.end(),
                                        [&](const FaqEntry& f) { return f.id == s.entry_id; });
              if (entry == faq.end()) continue;
              arr.push_back(
                  json{{"entry", *entry}, {"matched_text", s.matched_text}, {"score", s.score}});
            }
            send(res, 200, json{{"suggestions", std::move(arr)}});
          }));
}

}  // namespace rku::api
