// Validation suite runner: one pass/fail line per criterion, nonzero exit on
// any failure. The same checks back the `reclass validate` subcommand.

#include <cstdio>

#include "reclass/acceptance.hpp"

int main() {
  const auto results = reclass::run_acceptance();
  int failures = 0;
  for (const auto& result : results) {
    std::puts(reclass::format_criterion(result).c_str());
    if (!result.passed) ++failures;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}
