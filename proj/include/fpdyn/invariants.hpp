#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fpdyn {

struct CheckOutcome {
  bool passed = false;
  std::string detail;
};

struct InvariantCheck {
  std::string module;
  std::string name;
  std::function<CheckOutcome()> run;
};

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

const std::vector<InvariantCheck>& invariant_checks();

// Runs every check, concurrently when `parallel`; results come back in
// registration order. Exceptions thrown by a check count as failures.
std::vector<CheckResult> run_invariant_suite(bool parallel = true);

}  // namespace fpdyn
