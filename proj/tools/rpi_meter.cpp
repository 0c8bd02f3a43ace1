#include <iostream>
#include <string>
#include <vector>

#include "rpi/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return rpi::cli::run(args, std::cout, std::cerr);
}
