#include <iostream>
#include <string>
#include <vector>

#include "runner/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hhg::runner::run_cli(args, std::cout, std::cerr);
}
