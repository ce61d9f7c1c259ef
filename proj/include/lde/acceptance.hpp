#pragma once

// The acceptance suite: one entry per criterion, each evaluated at its pinned
// tolerance and runtime budget. Results carry a detail string with the
// measured numbers (and, where a criterion fails, the analysis).

#include <ostream>
#include <string>
#include <vector>

namespace lde {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string detail;
};

std::vector<CriterionResult> run_acceptance(std::ostream& log);

/// Prints the pass/fail table; returns the number of failed criteria.
int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& os);

}  // namespace lde
