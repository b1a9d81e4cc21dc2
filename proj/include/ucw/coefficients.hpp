#pragma once

#include <map>
#include <memory>
#include <string>

#include "ucw/types.hpp"

namespace ucw {

/// The data (A, V, eta) of the Robin problem
///   div(A Du) = V u   in B_R^+,
///   A Du . n  = eta u on Gamma_R,
/// together with the scalar bounds the frequency estimates consume:
/// ellipticity lambda (spectrum of A in [lambda, 1/lambda]), W^{1,inf}
/// bounds M of V and M_eta of eta, and the Dini modulus eps(r) of the
/// coefficient derivatives with its integral I_eps = int_0^1 eps(r)/r dr.
///
/// Field evaluation is pure; a CoefficientSet may be shared read-only
/// across workers.
struct CoefficientSet {
  std::string name = "unnamed";
  HalfBallDomain domain{2, 1.0};

  MatrixField A;
  MatrixDerivField DA;  // analytic when available; empty -> finite differences
  ScalarField V;
  VectorField DV;  // empty -> finite differences

  // Boundary fields, evaluated at points with x_d = 0.
  ScalarField eta;
  VectorField eta_tangential_grad;  // empty -> finite differences along Gamma

  double lambda = 1.0;
  double M = 0.0;
  double M_eta = 0.0;
  Modulus eps_modulus;  // r -> eps(r); empty means identically 0
  double I_eps = 0.0;
};

struct CoefficientEval {
  Mat A;
  std::vector<Mat> DA;  // DA[k](i,j) = d a_ij / d x_k
  double V = 0.0;
  Vec DV;
};

struct EtaEval {
  double eta = 0.0;
  Vec grad_tangential;  // last component zero
};

/// Evaluates (A, DA, V, DV) at an interior-or-boundary point of the closed
/// half ball. Analytic derivative closures are used when the set carries
/// them; otherwise 4th-order central differences with step
/// h = 1e-5 (1 + |x|). Throws validation_error outside the domain and
/// numerical_error when A(x) is not symmetric.
CoefficientEval eval(const CoefficientSet& cs, const Vec& x);

/// Evaluates (eta, tangential gradient of eta) at a flat-boundary point.
EtaEval eval_eta(const CoefficientSet& cs, const Vec& xb);

/// Empirical bounds from sampling. eps_hat is tabulated on dyadic annuli
/// {|x| in [r/2, r]} as sup of |x| |DA(x)| over 64 samples per annulus;
/// it is an estimate, not a certificate.
struct BoundsEstimate {
  double lambda_hat = 1.0;
  double M_hat = 0.0;
  double M_eta_hat = 0.0;
  std::vector<std::pair<double, double>> eps_hat;  // (r, eps_hat(r)), increasing r
  double I_eps_hat = 0.0;

  double eps_at(double r) const;  // piecewise-linear interpolation, eps(0)=0
};

/// Samples the fields on sample_count quasi-uniform points of the half
/// ball. Throws numerical_error if a sampled A is non-symmetric or not
/// positive definite (ellipticity violation).
BoundsEstimate estimate_bounds(const CoefficientSet& cs, int sample_count = 512);

/// Manufactured-coefficients construction: given a strictly positive u
/// (with |u| >= u_min on the closed domain; pass u_min <= 0 for the default
/// 1e-6 max|u|), sets V := div(A Du)/u and eta := <A Du, n>/u on Gamma with
/// n = -e_d, so that (u, result) satisfies the weak form of the Robin
/// problem. Throws numerical_error when the threshold is violated.
CoefficientSet manufacture_from_solution(const SmoothFunction& u,
                                         const MatrixField& A,
                                         const MatrixDerivField& DA,
                                         const HalfBallDomain& domain,
                                         double u_min = 0.0);

/// Built-in coefficient catalogue, addressable by name + parameters:
///   "identity"          A = I, V = 0, eta = 0
///   "constant"          constant symmetric A; params a11, a12, a22 (d=2)
///   "block"             diagonal-block A with A(0) = I; param c
///   "lipschitz-perturb" A = I + L-Lipschitz diagonal perturbation; param L
/// All accept optional params v0, eta0 adding constant V and eta, and
/// "radius" for the domain. Throws validation_error for unknown names.
CoefficientSet builtin_coefficients(const std::string& name,
                                    const std::map<std::string, double>& params = {});

/// Names of the built-in coefficient sets, alphabetized.
std::vector<std::string> coefficient_catalogue();

}  // namespace ucw
