#include <iostream>

#include "dhsys/cli.hpp"

int main(int argc, char** argv) {
  return dhsys::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
