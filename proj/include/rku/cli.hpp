#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rku/auth.hpp"
#include "rku/config.hpp"
#include "rku/time.hpp"

namespace rku::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 2;
inline constexpr int kExitUsage = 64;

struct CliContext {
  std::ostream& out;
  std::ostream& err;
  Clock clock = system_clock();
  Environment env;
  auth::HashCost hash_cost = auth::HashCost::interactive();
};

/// Runs one `rku` invocation; args exclude the program name.
int run(const std::vector<std::string>& args, CliContext& ctx);

}  // namespace rku::cli
