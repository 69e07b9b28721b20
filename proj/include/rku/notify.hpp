#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rku/domain.hpp"

namespace rku::notify {

/// Raised once per order entering Completed; replaces the phone call.
struct NotificationEvent {
  std::string nota;
  std::string customer_name;
  std::string customer_email;
  std::optional<std::string> customer_phone;
  std::string message;
  Timestamp emitted_at{};

  friend bool operator==(const NotificationEvent&, const NotificationEvent&) = default;
};

nlohmann::json to_json(const NotificationEvent& e);

NotificationEvent completion_event(const ServiceOrder& order, const Customer& customer,
                                   Timestamp now);

class Sink {
 public:
  virtual ~Sink() = default;
  /// Must not throw; delivery failures are the sink's own business.
  virtual void deliver(const NotificationEvent& event) = 0;
};

/// One JSON line per event.
class LogSink final : public Sink {
 public:
  explicit LogSink(std::ostream& out);
  void deliver(const NotificationEvent& event) override;

 private:
  std::mutex mutex_;
  std::ostream& out_;
};

/// Keeps every event; for tests and the acceptance suite.
class MemorySink final : public Sink {
 public:
  void deliver(const NotificationEvent& event) override;
  std::vector<NotificationEvent> events() const;

 private:
  mutable std::mutex mutex_;
  std::vector<NotificationEvent> events_;
};

/// POSTs the event body to a URL. Returns true on a 2xx answer.
using Transport = std::function<bool(const std::string& url, const std::string& body)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

Transport http_transport(std::chrono::seconds timeout = std::chrono::seconds(5));

struct RetryPolicy {
  std::vector<std::chrono::milliseconds> backoff{std::chrono::seconds(1), std::chrono::seconds(2),
                                                 std::chrono::seconds(4)};
};

/// First attempt happens inside deliver(); failed events are handed to a
/// background worker that retries once per backoff step and then logs the
/// failure to `log`.
class WebhookSink final : public Sink {
 public:
  WebhookSink(std::string url, Transport transport, std::ostream& log, RetryPolicy policy = {},
              Sleeper sleeper = {});
  ~WebhookSink() override;

  WebhookSink(const WebhookSink&) = delete;
  WebhookSink& operator=(const WebhookSink&) = delete;

  void deliver(const NotificationEvent& event) override;

  /// Blocks until the retry queue is drained.
  void flush();

  std::size_t delivered() const noexcept { return delivered_; }
  std::size_t failed() const noexcept { return failed_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  bool attempt(const std::string& body);
  void run();

  std::string url_;
  Transport transport_;
  std::ostream& log_;
  RetryPolicy policy_;
  Sleeper sleeper_;

  std::atomic<std::size_t> delivered_{0};
  std::atomic<std::size_t> failed_{0};
  std::atomic<std::size_t> attempts_{0};

  std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> pending_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

/// Fans an event out to every sink. Counts events even with no sinks.
class Dispatcher {
 public:
  void add_sink(std::shared_ptr<Sink> sink);
  void emit(const NotificationEvent& event);
  std::size_t emitted() const noexcept { return emitted_; }

 private:
  std::mutex mutex_;
  std::vector<std::shared_ptr<Sink>> sinks_;
  std::atomic<std::size_t> emitted_{0};
};

}  // namespace rku::notify
