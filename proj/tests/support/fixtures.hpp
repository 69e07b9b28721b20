#pragma once

#include <stdlib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "rku/time.hpp"

namespace rku::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "rku-test-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

/// Clock the test can move; copies share the same time.
class ManualClock {
 public:
  explicit ManualClock(Timestamp start)
      : seconds_(std::make_shared<std::atomic<long long>>(start.time_since_epoch().count())) {}

  Timestamp now() const { return Timestamp{std::chrono::seconds{seconds_->load()}}; }
  void advance(std::chrono::seconds d) { seconds_->fetch_add(d.count()); }
  void set(Timestamp t) { seconds_->store(t.time_since_epoch().count()); }

  Clock clock() const {
    auto s = seconds_;
    return [s] { return Timestamp{std::chrono::seconds{s->load()}}; };
  }

 private:
  std::shared_ptr<std::atomic<long long>> seconds_;
};

inline Timestamp t0() { return make_timestamp(2016, 5, 20, 8, 0, 0); }

inline std::u32string random_string(std::mt19937& rng, std::u32string_view alphabet,
                                    std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::u32string s(len(rng), U' ');
  for (auto& c : s) c = alphabet[pick(rng)];
  return s;
}

}  // namespace rku::testing
