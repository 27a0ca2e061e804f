#include <iostream>

#include "gaugecert/cli.hpp"

int main(int argc, char** argv) {
  return gaugecert::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
