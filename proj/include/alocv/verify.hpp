#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alocv::verify {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the acceptance criteria A1..A10 (identity, bound and scaling checks
/// at desk scale). `only` filters by id; empty runs everything. Experiment
/// outputs land under work_dir.
std::vector<CriterionResult> run_criteria(const std::vector<std::string>& only = {},
                                          const std::string& work_dir = "acceptance_out");

/// Prints one pass/fail line per criterion to out; returns the failure count.
int run_and_report(std::ostream& out, const std::vector<std::string>& only = {},
                   const std::string& work_dir = "acceptance_out");

}  // namespace alocv::verify
