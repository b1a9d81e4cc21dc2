#pragma once

#include "ucw/gauss.hpp"
#include "ucw/types.hpp"

namespace ucw {

/// Node counts for the half-ball product rules. The defaults match the
/// documented 64 radial x 128 angular configuration.
struct QuadratureSpec {
  int n_rad = 64;
  int n_ang = 128;
};

/// Product rule for integrals against the degenerate weight
/// (r^2 - |x|^2)^p, either over the half-ball B_r^+ or over the flat
/// boundary piece Gamma_r.
///
/// Radial direction: Gauss-Jacobi adapted to the (r-s)^p factor; the smooth
/// remainder (r+s)^p s^(d-1) is folded into the weights, so weights stay
/// positive and integer-p polynomial exactness is preserved. Angular
/// direction (d=2): Gauss-Legendre on [0, pi]; (d=3): Gauss-Legendre in
/// cos(polar) on [0, 1] times an equal-weight periodic rule in azimuth.
struct QuadratureRule {
  int dim = 2;
  double radius = 1.0;
  double power = 0.0;
  std::vector<Vec> points;
  std::vector<double> weights;  // weight factors, all > 0

  static QuadratureRule halfball(int dim, double r, double p,
                                 const QuadratureSpec& spec = {});
  static QuadratureRule boundary(int dim, double r, double p,
                                 const QuadratureSpec& spec = {});

  /// Sum of w_i * f(x_i) with compensated accumulation in index order.
  double integrate(const ScalarField& f) const;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// integral over B_r^+ of f(x) (r^2-|x|^2)^p dx. Requires r > 0 and
/// p > -1. The error estimate pairs the requested rule with a one-level
/// coarsening (half the node counts).
IntegralResult weighted_halfball_integral(const ScalarField& f, int dim,
                                          double r, double p,
                                          const QuadratureSpec& spec = {});

/// integral over Gamma_r of g(x) (r^2-|x|^2)^p dsigma. Requires r > 0 and
/// p >= 0.
IntegralResult weighted_boundary_integral(const ScalarField& g, int dim,
                                          double r, double p,
                                          const QuadratureSpec& spec = {});

}  // namespace ucw
