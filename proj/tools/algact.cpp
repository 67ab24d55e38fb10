#include <iostream>
#include <string>
#include <vector>

#include "algact/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return algact::cli::run(args, std::cout, std::cerr);
}
