#include <cstdlib>
#include <iostream>
#include <string>

#include "galmod/selftest.hpp"

// One PASS/FAIL line per acceptance criterion; nonzero exit when any fails.
int main(int argc, char** argv) {
  galmod::AcceptanceOptions options;
  for (int k = 1; k + 1 < argc; k += 2) {
    const std::string flag = argv[k];
    if (flag == "--jobs") options.jobs = std::strtoul(argv[k + 1], nullptr, 10);
  }
  bool all = true;
  for (const auto& r : galmod::run_acceptance(options)) {
    std::cout << galmod::format_result(r) << std::endl;
    all = all && r.pass;
  }
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
