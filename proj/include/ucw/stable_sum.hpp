#pragma once

#include <cmath>

namespace ucw {

/// Neumaier compensated accumulator. Used everywhere quadrature sums are
/// formed, with a fixed traversal order, so results are bit-identical
/// across runs and worker counts.
class StableSum {
 public:
  StableSum() = default;
  explicit StableSum(double init) : sum_(init) {}

  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }

  double get() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace ucw
