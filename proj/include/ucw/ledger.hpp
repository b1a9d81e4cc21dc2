#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucw {

/// One sampled instance of an inequality of the form
///   lhs <= fixed + C * basis,
/// tagged by the sweep coordinates it was taken at.
struct InequalitySample {
  double r = 0.0;
  double extra = 0.0;  // delta, kappa, ... depending on the check
  std::string tag;     // test-function / case label
  double lhs = 0.0;
  double fixed = 0.0;
  double basis = 0.0;
};

/// Samples of a named inequality with the minimal admissible constant over
/// the sweep. A sample with basis <= 0 admits no help from C and must hold
/// outright; samples with basis < 0 cap C from above. The violation list is
/// empty iff the minimal C is finite and feasible.
struct InequalityCheck {
  std::string name;
  std::vector<InequalitySample> samples;
  double fitted_C = 0.0;
  bool feasible = true;
  std::vector<std::string> violations;

  void add(InequalitySample s) { samples.push_back(std::move(s)); }

  /// Computes fitted_C and the violation list. rel_slack absorbs quadrature
  /// and finite-difference noise relative to the sample magnitudes.
  void fit(double rel_slack = 1e-9, double abs_slack = 1e-13);
};

struct InequalityLedger {
  std::vector<InequalityCheck> checks;

  InequalityCheck* find(const std::string& name);
  const InequalityCheck* find(const std::string& name) const;
  bool clean() const;
  void write_csv(std::ostream& os) const;
  void write_summary(std::ostream& os) const;
};

}  // namespace ucw
