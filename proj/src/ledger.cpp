#include "ucw/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ucw {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void InequalityCheck::fit(double rel_slack, double abs_slack) {
  feasible = true;
  violations.clear();
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  for (const InequalitySample& s : samples) {
    const double slack =
        rel_slack * (std::abs(s.lhs) + std::abs(s.fixed)) + abs_slack;
    const double gap = s.lhs - s.fixed;
    if (s.basis > slack) {
      lower = std::max(lower, gap / s.basis);
    } else if (s.basis < -slack) {
      upper = std::min(upper, gap / s.basis);
    } else if (gap > slack) {
      violations.push_back("at r=" + fmt(s.r) + " " + s.tag +
                           ": lhs exceeds rhs with vanishing C-basis");
    }
  }
  fitted_C = std::max(0.0, lower);
  if (fitted_C > upper) {
    feasible = false;
    violations.push_back("no admissible constant: lower bound " + fmt(fitted_C) +
                         " exceeds upper bound " + fmt(upper));
  }
  for (const InequalitySample& s : samples) {
    const double rhs = s.fixed + fitted_C * s.basis;
    const double slack =
        rel_slack * (std::abs(s.lhs) + std::abs(rhs)) + abs_slack;
    if (s.lhs > rhs + slack)
      violations.push_back("at r=" + fmt(s.r) + " " + s.tag + ": lhs=" +
                           fmt(s.lhs) + " > rhs=" + fmt(rhs));
  }
  if (!violations.empty()) feasible = false;
}

InequalityCheck* InequalityLedger::find(const std::string& name) {
  for (auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const InequalityCheck* InequalityLedger::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool InequalityLedger::clean() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) {
    return c.feasible && c.violations.empty();
  });
}

void InequalityLedger::write_csv(std::ostream& os) const {
  os << "check,r,extra,tag,lhs,fixed,basis,fitted_C\n";
  for (const auto& c : checks)
    for (const auto& s : c.samples)
      os << c.name << "," << fmt(s.r) << "," << fmt(s.extra) << "," << s.tag
         << "," << fmt(s.lhs) << "," << fmt(s.fixed) << "," << fmt(s.basis)
         << "," << fmt(c.fitted_C) << "\n";
}

void InequalityLedger::write_summary(std::ostream& os) const {
  for (const auto& c : checks) {
    os << c.name << ": fitted C = " << fmt(c.fitted_C) << ", samples = "
       << c.samples.size() << ", violations = " << c.violations.size() << "\n";
    for (const auto& v : c.violations) os << "  " << v << "\n";
  }
}

}  // namespace ucw
