#include <iostream>
#include <string>
#include <vector>

#include "qda/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qda::dispatch(args, std::cout, std::cerr);
}
