#pragma once

#include <string>
#include <vector>

namespace superres {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed deviation
  double tolerance = 0.0;
  std::string detail;
};

// Structural invariants: POVM completeness and positivity, density matrices, SLD
// relation, weak commutation, Helstrom/ROTADE equivalence, Loewner order,
// sigma-rescaling invariance and seeded reproducibility.
std::vector<CheckResult> run_selftest();

}  // namespace superres
