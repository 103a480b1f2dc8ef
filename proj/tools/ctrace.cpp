#include <iostream>
#include <string>
#include <vector>

#include "ctrace/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ctrace::cli::run_command(args, std::cout, std::cerr);
}
