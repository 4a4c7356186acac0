#include <iostream>
#include <string>
#include <vector>

#include "qdos/doscli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qdos::doscli::run_cli(args, std::cout, std::cerr);
}
