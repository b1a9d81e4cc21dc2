#pragma once

#include <functional>
#include <vector>

namespace ucw {

/// Nodes and weights of a one-dimensional rule on [-1, 1].
struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule (weight 1 on [-1, 1]).
Rule1d gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1],
/// a, b > -1. Computed by Golub-Welsch from the Jacobi recurrence; nodes
/// are interior and all weights positive.
Rule1d gauss_jacobi(int n, double a, double b);

/// Composite adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

}  // namespace ucw
