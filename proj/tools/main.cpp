#include <iostream>
#include <string>
#include <vector>

#include "cygnet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cygnet::dispatch(args, std::cout, std::cerr);
}
