#pragma once

#include <string>
#include <vector>

namespace reclass {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the full validation suite: paper-value checks, oracle equivalences,
/// property sweeps and pipeline round trips. Each criterion is independent;
/// all are evaluated even when earlier ones fail.
std::vector<CriterionResult> run_acceptance();

/// Formats one "PASS|FAIL  id  name  detail" line.
std::string format_criterion(const CriterionResult& result);

}  // namespace reclass
