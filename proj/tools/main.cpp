#include <iostream>
#include <string>
#include <vector>

#include "lightsnn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lightsnn::run_cli(args, std::cout, std::cerr);
}
