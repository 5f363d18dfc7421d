#include <iostream>
#include <string>
#include <vector>

#include "hocal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hocal::run_pipeline(args, std::cout, std::cerr);
}
