#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  optcbf::cli::init_logging();
  return optcbf::cli::run_cli(argc, argv, std::cout, std::cerr);
}
