#include <iostream>
#include <string>
#include <vector>

#include "aiscene/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return aiscene::cli::run(args, std::cout, std::cerr);
}
