#pragma once

#include <string>
#include <vector>

#include "pvar/config.hpp"

namespace pvar {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-test run by the `check` command: finite-difference gradient checks,
/// Hamiltonian drift and flow invertibility at the configured number of time
/// steps, and the inclusion/monotonicity/shifted-segment properties of the
/// partial dissimilarity. Problems are generated from `cfg.seed`.
std::vector<CheckResult> run_builtin_checks(const RegistrationConfig& cfg);

}  // namespace pvar
