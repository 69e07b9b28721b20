#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace rku {

struct ServerConfig {
  std::filesystem::path store_path = "./data";
  int port = 8080;
  std::string bind_address = "0.0.0.0";
  std::chrono::hours token_ttl{24};
  std::optional<std::string> webhook_url;
  std::optional<std::filesystem::path> static_dir;
};

using Environment = std::map<std::string, std::string>;

/// RKU_* variables from the process environment.
Environment process_environment();

/// Defaults, then the JSON config file (if given), then the environment.
/// Config keys: store_path, port, token_ttl_hours, webhook_url, static_dir.
/// Throws Error(Validation) on unreadable files or bad values.
ServerConfig load_config(const std::optional<std::filesystem::path>& file, const Environment& env);

}  // namespace rku
