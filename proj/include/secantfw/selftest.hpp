#pragma once

// Acceptance suite shared by the acceptance test binary and `secantfw selftest`.

#include <functional>
#include <string>
#include <vector>

namespace secantfw::selftest {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string title;
  std::function<CriterionResult()> run;
};

/// Criteria 1-9 in order. Every tolerance is a constant inside its check.
const std::vector<Criterion>& criteria();

/// Runs one criterion, converting exceptions into a failed result.
CriterionResult run_criterion(const Criterion& c);

/// "PASS [3] title: detail (0.012 s)".
std::string format_result(const CriterionResult& r);

}  // namespace secantfw::selftest
