#include "symta/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return symta::run_cli(argc, argv, std::cout, std::cerr);
}
