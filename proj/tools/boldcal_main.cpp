#include <iostream>
#include <string>
#include <vector>

#include "boldcal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return boldcal::run_cli(args, std::cout, std::cerr);
}
