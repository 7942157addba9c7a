#include <iostream>
#include <string>
#include <vector>

#include "bsemitoric/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bsemitoric::run(args, std::cout, std::cerr);
}
