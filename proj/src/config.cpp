#include "rku/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rku/error.hpp"

extern char** environ;

namespace rku {

namespace {

int parse_int(const std::string& text, const char* what, int lo, int hi) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || value < lo || value > hi) {
    throw Error(ErrorCode::Validation, std::string("invalid ") + what + ": " + text);
  }
  return value;
}

}  // namespace

Environment process_environment() {
  Environment env;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    if (entry.rfind("RKU_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    env[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return env;
}

ServerConfig load_config(const std::optional<std::filesystem::path>& file, const Environment& env) {
  ServerConfig cfg;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::Validation, "cannot read config file " + file->string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      if (j.contains("store_path")) cfg.store_path = j["store_path"].get<std::string>();
      if (j.contains("port")) cfg.port = j["port"].get<int>();
      if (j.contains("token_ttl_hours"))
        cfg.token_ttl = std::chrono::hours(j["token_ttl_hours"].get<int>());
      if (j.contains("webhook_url") && !j["webhook_url"].is_null()) {
        cfg.webhook_url = j["webhook_url"].get<std::string>();
      }
      if (j.contains("static_dir") && !j["static_dir"].is_null()) {
        cfg.static_dir = j["static_dir"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Validation, "bad config file: " + std::string(e.what()));
    }
  }
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = env.find(key);
    if (it == env.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("RKU_STORE_PATH")) cfg.store_path = *v;
  if (auto v = get("RKU_PORT")) cfg.port = parse_int(*v, "RKU_PORT", 0, 65535);
  if (auto v = get("RKU_TOKEN_TTL_HOURS")) {
    cfg.token_ttl = std::chrono::hours(parse_int(*v, "RKU_TOKEN_TTL_HOURS", 1, 24 * 365));
  }
  if (auto v = get("RKU_WEBHOOK_URL")) cfg.webhook_url = *v;
  if (auto v = get("RKU_STATIC_DIR")) cfg.static_dir = *v;
  if (cfg.port < 0 || cfg.port > 65535) throw Error(ErrorCode::Validation, "port out of range");
  if (cfg.token_ttl.count() < 1) throw Error(ErrorCode::Validation, "token TTL must be positive");
  return cfg;
}

}  // namespace rku
