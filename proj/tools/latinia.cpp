#include <iostream>

#include "latinia/cli.hpp"

int main(int argc, char** argv) {
  return latinia::run_cli(argc, argv, std::cout, std::cerr);
}
