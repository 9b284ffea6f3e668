// Acceptance runner: executes every acceptance criterion at its stated
// parameters and tolerance, printing one pass/fail line per criterion.
// Exit code 0 iff all pass.

#include <cstdio>
#include <vector>

#include "dynmatch/suites.hpp"

int main() {
  using namespace dynmatch::suites;
  std::vector<CriterionResult> results;
  results.push_back(criterion_coloring());
  results.push_back(criterion_sampling_probability());
  results.push_back(criterion_negative_correlation());
  results.push_back(criterion_fractional_value());
  results.push_back(criterion_kernels());
  results.push_back(criterion_kernel_matching());
  results.push_back(criterion_endtoend());
  results.push_back(criterion_det_tradeoff());
  results.push_back(criterion_scaling());
  results.push_back(criterion_determinism());

  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] criterion %d: %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: FAILURES present");
  return all ? 0 : 1;
}
