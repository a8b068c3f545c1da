#include <iostream>
#include <string>
#include <vector>

#include "confimm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return confimm::run_cli(args, std::cout, std::cerr);
}
