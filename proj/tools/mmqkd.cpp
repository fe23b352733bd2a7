#include <iostream>
#include <string>
#include <vector>

#include "mmqkd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mmqkd::run_cli(args, std::cout, std::cerr);
}
