#include <iostream>
#include <string>
#include <vector>

#include "cvxtau/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cvxtau::cli::run(args, std::cout, std::cerr);
}
