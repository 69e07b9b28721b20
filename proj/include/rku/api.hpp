#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "rku/auth.hpp"
#include "rku/config.hpp"
#include "rku/error.hpp"
#include "rku/fuzzy.hpp"
#include "rku/notify.hpp"
#include "rku/service_desk.hpp"
#include "rku/store.hpp"

namespace httplib {
class Server;
}

namespace rku::api {

/// Items returned by any listing endpoint.
inline constexpr std::size_t kListCap = 100;
inline constexpr std::size_t kDefaultSuggestionLimit = 10;

int http_status(ErrorCode code) noexcept;

/// HTTP/JSON facade. Owns nothing but the route table and the FAQ corpus;
/// the store, auth service and dispatcher are shared with the caller.
class ApiServer {
 public:
  ApiServer(Store& store, auth::AuthService& auth, notify::Dispatcher& dispatcher, Clock clock,
            std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws Error(StorageFailure) when binding fails.
  int start(const std::string& host, int port);
  /// Blocks the caller until stop() is called from elsewhere.
  void listen(const std::string& host, int port);
  void stop();

 private:
  void install_routes();
  /// Corpus over the given FAQ list; rebuilt whenever the list changes.
  std::shared_ptr<const fuzzy::SearchCorpus> corpus_for(const std::vector<FaqEntry>& faq);

  Store& store_;
  auth::AuthService& auth_;
  notify::Dispatcher& dispatcher_;
  Clock clock_;
  ServiceDesk desk_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;

  std::mutex corpus_mutex_;
  std::vector<FaqEntry> corpus_faq_;
  std::shared_ptr<const fuzzy::SearchCorpus> corpus_;
};

}  // namespace rku::api
