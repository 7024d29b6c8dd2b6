#include <iostream>
#include <string>
#include <vector>

#include "kvplate/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kvplate::run(args, std::cout, std::cerr);
}
