#include <iostream>
#include <string>
#include <vector>

#include "rku/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  rku::cli::CliContext ctx{std::cout, std::cerr};
  ctx.env = rku::process_environment();
  return rku::cli::run(args, ctx);
}
