#include "ucw/gauss.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ucw/types.hpp"

namespace ucw {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal matrix
// built from the three-term recurrence, weights are mu0 * (first eigenvector
// component)^2.
Rule1d golub_welsch(const std::vector<double>& alpha,
                    const std::vector<double>& beta, double mu0) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = alpha[k];
    if (k + 1 < n) {
      const double off = std::sqrt(beta[k + 1]);
      J(k, k + 1) = off;
      J(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw numerical_error("golub_welsch: eigensolver failed");
  Rule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

Rule1d gauss_legendre(int n) {
  if (n < 1) throw validation_error("gauss_legendre: n must be >= 1");
  std::vector<double> alpha(n, 0.0), beta(n, 0.0);
  for (int k = 1; k < n; ++k) beta[k] = k * k / (4.0 * k * k - 1.0);
  return golub_welsch(alpha, beta, 2.0);
}

Rule1d gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw validation_error("gauss_jacobi: n must be >= 1");
  if (a <= -1.0 || b <= -1.0)
    throw validation_error("gauss_jacobi: exponents must exceed -1");
  std::vector<double> alpha(n), beta(n, 0.0);
  const double ab = a + b;
  alpha[0] = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    alpha[k] = (b * b - a * a) / den;
  }
  if (n > 1)
    beta[1] = 4.0 * (a + 1.0) * (b + 1.0) /
              ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
  for (int k = 2; k < n; ++k) {
    const double t = 2.0 * k + ab;
    beta[k] = 4.0 * k * (k + a) * (k + b) * (k + ab) /
              (t * t * (t + 1.0) * (t - 1.0));
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  return golub_welsch(alpha, beta, mu0);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace ucw
