// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <cstdio>

#include "nfg/checks.hpp"

int main() {
  const std::vector<nfg::CheckResult> results = nfg::run_acceptance_checks();
  int failures = 0;
  for (const nfg::CheckResult& r : results) {
    std::printf("[%s] %2d. %s — %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    if (!r.passed) ++failures;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}
