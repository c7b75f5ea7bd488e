// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "cli/acceptance.hpp"

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::off);
  optcbf::cli::AcceptanceOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  const auto results = optcbf::cli::run_acceptance(opts, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << '/' << results.size()
            << " acceptance criteria passed\n";
  return failed == 0 ? 0 : 1;
}
