#include <iostream>
#include <string>
#include <vector>

#include "mucows/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mucows::run_cli(args, std::cin, std::cout, std::cerr);
}
