#include "memtransform/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return memtransform::cli::run(args, std::cout, std::cerr);
}
