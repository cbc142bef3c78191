#ifndef CHANEST_VALIDATION_HPP
#define CHANEST_VALIDATION_HPP

#include <string>
#include <vector>

#include "chanest/quadrature.hpp"

namespace chanest {

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // worst deviation or the first failing case
  double seconds = 0.0;
};

struct ValidationOptions {
  int resolution = SphereQuadrature::kDefaultResolution;
  /// Test hook: perturbs the twelve-parameter affine map (M(0,2) += 1e-3)
  /// before the parametrization check. The suite must then fail.
  bool inject_affine_fault = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  double seconds = 0.0;

  bool all_passed() const;
  static constexpr double kSoftBudgetSeconds = 60.0;
};

/// Closed-form, enumeration and quadrature identities plus complete
/// positivity checks across every channel family and protocol.
ValidationReport run_validation(const ValidationOptions& opts = {});

}  // namespace chanest

#endif  // CHANEST_VALIDATION_HPP
