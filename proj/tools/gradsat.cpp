#include <iostream>
#include <string>
#include <vector>

#include "gradsat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gradsat::main_solve(args, std::cout, std::cerr);
}
