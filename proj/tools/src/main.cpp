#include <iostream>

#include "gyrstab_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gyrstab::cli::run(args, std::cout, std::cerr);
}
