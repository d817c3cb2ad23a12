#include <iostream>

#include "prosumer/cli.h"

int main(int argc, char** argv) {
  return prosumer::run_cli(argc, argv, std::cout, std::cerr);
}
