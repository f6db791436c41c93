// Acceptance suite: runs every criterion and prints one pass/fail line each.
// Usage: acceptance [A1 A2 ...] to run a subset.

#include <iostream>
#include <string>
#include <vector>

#include "alocv/verify.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = alocv::verify::run_and_report(std::cout, only, "acceptance_out");
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  return 0;
}
