#pragma once

#include <string>
#include <vector>

namespace nfg {

// One verdict from the invariant/acceptance suite.
struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the full invariant suite (identity checks, oracle accounting, memory
// accounting, rate guarantees, zero-chain properties, gradient cross-checks,
// determinism, parser robustness, tuned-vs-theoretical orderings).
std::vector<CheckResult> run_acceptance_checks();

}  // namespace nfg
