#include <iostream>
#include <string>
#include <vector>

#include "hdgknn/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hdgknn::run_cli(args, std::cout, std::cerr);
}
