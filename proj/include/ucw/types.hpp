#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucw {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

/// Derivative of a matrix field: entry k of the result is the elementwise
/// partial d A / d x_k.
using MatrixDerivField = std::function<std::vector<Mat>(const Vec&)>;

/// Scalar function of one variable (moduli, radial profiles).
using Modulus = std::function<double(double)>;

/// Runtime numerical failure (quadrature blow-up, singular system, ...).
/// Maps to CLI exit code 2.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input or configuration. Maps to CLI exit code 1.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Half-ball B_R^+ = {|x| <= R, x_d >= 0} with flat boundary piece
/// Gamma_R = {|x| <= R, x_d = 0}.
struct HalfBallDomain {
  int dim = 2;
  double r_max = 1.0;

  bool contains(const Vec& x, double tol = 1e-12) const {
    return x.size() == dim && x[dim - 1] >= -tol && x.norm() <= r_max + tol;
  }
  bool on_flat_boundary(const Vec& x, double tol = 1e-12) const {
    return contains(x, tol) && std::abs(x[dim - 1]) <= tol;
  }
};

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

/// A scalar function with its first two derivatives. hess may be empty;
/// consumers fall back to finite differences of grad.
struct SmoothFunction {
  ScalarField value;
  VectorField grad;
  MatrixField hess;
};

}  // namespace ucw
