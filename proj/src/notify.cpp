#include "rku/notify.hpp"

#include <httplib.h>

namespace rku::notify {

namespace {
std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

nlohmann::json to_json(const NotificationEvent& e) {
  return nlohmann::json{
      {"nota", e.nota},
      {"customer_name", e.customer_name},
      {"customer_email", e.customer_email},
      {"customer_phone", e.customer_phone ? nlohmann::json(*e.customer_phone) : nlohmann::json()},
      {"message", e.message},
      {"emitted_at", format_iso8601(e.emitted_at)},
  };
}

NotificationEvent completion_event(const ServiceOrder& order, const Customer& customer,
                                   Timestamp now) {
  NotificationEvent e;
  e.nota = order.nota.str();
  e.customer_name = customer.name;
  e.customer_email = customer.email;
  e.customer_phone = customer.phone;
  e.message = "Your " + std::string(to_string(order.device.category)) + " (" +
              (order.device.brand.empty() ? order.device.description : order.device.brand) +
              ") with nota " + e.nota + " has been repaired and is ready for pickup.";
  e.emitted_at = now;
  return e;
}

LogSink::LogSink(std::ostream& out) : out_(out) {}

void LogSink::deliver(const NotificationEvent& event) {
  std::lock_guard lock(mutex_);
  out_ << "[notification] " << to_json(event).dump() << '\n' << std::flush;
}

void MemorySink::deliver(const NotificationEvent& event) {
  std::lock_guard lock(mutex_);
  events_.push_back(event);
}

std::vector<NotificationEvent> MemorySink::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

Transport http_transport(std::chrono::seconds timeout) {
  return [timeout](const std::string& url, const std::string& body) {
    // scheme://host[:port][/path]
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, body, "application/json");
    return res && res->status >= 200 && res->status < 300;
  };
}

WebhookSink::WebhookSink(std::string url, Transport transport, std::ostream& log,
                         RetryPolicy policy, Sleeper sleeper)
    : url_(std::move(url)),
      transport_(std::move(transport)),
      log_(log),
      policy_(std::move(policy)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
      })) {
  worker_ = std::thread([this] { run(); });
}

WebhookSink::~WebhookSink() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

bool WebhookSink::attempt(const std::string& body) {
  ++attempts_;
  try {
    return transport_(url_, body);
  } catch (...) {
    return false;
  }
}

void WebhookSink::deliver(const NotificationEvent& event) {
  std::string body = to_json(event).dump();
  if (attempt(body)) {
    ++delivered_;
    return;
  }
  {
    std::lock_guard lock(mutex_);
    pending_.push_back(std::move(body));
  }
  cv_.notify_one();
}

void WebhookSink::flush() {
  std::unique_lock lock(mutex_);
  idle_cv_.wait(lock, [this] { return pending_.empty() && !busy_; });
}

void WebhookSink::run() {
  std::unique_lock lock(mutex_);
  while (true) {
    cv_.wait(lock, [this] { return stopping_ || !pending_.empty(); });
    if (pending_.empty()) return;
    std::string body = std::move(pending_.front());
    pending_.pop_front();
    busy_ = true;
    lock.unlock();

    bool ok = false;
    for (auto delay : policy_.backoff) {
      sleeper_(delay);
      if ((ok = attempt(body))) break;
    }
    if (ok) {
      ++delivered_;
    } else {
      ++failed_;
      std::lock_guard log_lock(log_mutex());
      log_ << "[webhook] delivery to " << url_ << " failed after " << policy_.backoff.size()
           << " retries: " << body << '\n'
           << std::flush;
    }

    lock.lock();
    busy_ = false;
    if (pending_.empty()) idle_cv_.notify_all();
  }
}

void Dispatcher::add_sink(std::shared_ptr<Sink> sink) {
  std::lock_guard lock(mutex_);
  sinks_.push_back(std::move(sink));
}

void Dispatcher::emit(const NotificationEvent& event) {
  ++emitted_;
  std::vector<std::shared_ptr<Sink>> sinks;
  {
    std::lock_guard lock(mutex_);
    sinks = sinks_;
  }
  for (const auto& sink : sinks) sink->deliver(event);
}

}  // namespace rku::notify
