#pragma once

#include <iosfwd>
#include <optional>

#include "ucw/coefficients.hpp"
#include "ucw/ledger.hpp"
#include "ucw/quadrature.hpp"
#include "ucw/solutions.hpp"

namespace ucw {

/// Weight exponent, radius grid, and finite-difference step for the
/// frequency sweep. The lemmas require alpha >= 1 and radii in (0, 1].
struct FrequencyConfig {
  double alpha = 1.0;
  std::vector<double> r_grid;
  double fd_step_rel = 1e-3;
  QuadratureSpec quad{64, 128};
  double h_degeneracy_rel = 1e-14;
  double decomposition_residual_threshold = 1e-6;

  static std::vector<double> linear_grid(double lo, double hi, int count);
  static std::vector<double> log_grid(double lo, double hi, int count);
  void validate() const;
};

/// Conformal factor mu = <A x, x>/|x|^2; at x = 0 defined by the limit 1
/// under the normalization A(0) = I (error otherwise).
double conformal_mu(const MatrixField& A, const Vec& x);

/// mu together with its gradient, from analytic DA.
struct MuEval {
  double mu;
  Vec grad;
};
MuEval conformal_mu_with_grad(const Mat& A, const std::vector<Mat>& DA,
                              const Vec& x);

/// beta = A x / mu with its Jacobian by the chain rule.
struct BetaEval {
  Vec beta;
  Mat jacobian;
  double divergence() const { return jacobian.trace(); }
};
BetaEval beta_field(const CoefficientSet& cs, const Vec& x);

/// H(r) = int_{B_r^+} u^2 (r^2-|x|^2)^alpha mu.
double height_H(const Solution& u, const CoefficientSet& cs, double r,
                double alpha, const QuadratureSpec& spec = {});

/// I(r) = 2(alpha+1) int_{B_r^+} <A Du, x> u (r^2-|x|^2)^alpha.
double energy_I(const Solution& u, const CoefficientSet& cs, double r,
                double alpha, const QuadratureSpec& spec = {});

/// The equivalent-form split I = I1 + I2 + I3 with majorants:
///   I1 = int <A Du, Du> w^(alpha+1)        (>= 0)
///   I2 = int V u^2 w^(alpha+1)
///   I3 = -int_Gamma eta u^2 w^(alpha+1)
///   I2~ = int |V| u^2 w^(alpha+1),  I3~ = int_Gamma |eta| u^2 w^(alpha+1).
/// Valid only when u solves the problem; refuses (numerical_error) when the
/// solution's weak residual exceeds the configured threshold.
struct EnergyDecomposition {
  double I1 = 0, I2 = 0, I3 = 0, I2_tilde = 0, I3_tilde = 0;
  double sum() const { return I1 + I2 + I3; }
};
EnergyDecomposition energy_decomposition(const Solution& u,
                                         const CoefficientSet& cs, double r,
                                         double alpha,
                                         const QuadratureSpec& spec = {},
                                         double residual_threshold = 1e-6);

/// N(r) = I(r)/H(r); degenerate-height error when H falls under
/// h_floor (pass the profile-level floor, or an absolute threshold).
double frequency_N(const Solution& u, const CoefficientSet& cs, double r,
                   double alpha, const QuadratureSpec& spec = {},
                   double h_floor = 1e-300);

/// One radius row of the sweep. Derivative columns use central differences
/// with one Richardson level. valid is false when H is degenerate at this
/// radius (quotient columns are then meaningless).
struct RadiusSample {
  double r = 0;
  double H = 0, I = 0;
  double I1 = 0, I2 = 0, I3 = 0, I2_tilde = 0, I3_tilde = 0;
  double N = 0;
  double dH = 0, dI = 0, dN = 0;
  double Ntilde = 0;
  bool valid = true;
};

struct FrequencyProfile {
  FrequencyConfig config;
  std::vector<RadiusSample> rows;
  double H_max = 0.0;

  void write_csv(std::ostream& os) const;  // paper-symbol header row
};

/// Full grid sweep of the Section-2 quantities; Ntilde is filled with the
/// run's fitted almost-monotonicity constant.
FrequencyProfile build_profile(const Solution& u, const CoefficientSet& cs,
                               const FrequencyConfig& fc);

/// E(r) = int_0^r (eps(s)+s)/s ds, the correction integral of the
/// almost-monotonicity machinery (lower cutoff 1e-8; the omitted piece is
/// O(eps(cutoff)) for the Dini moduli used here).
double epsilon_tilde_integral(const CoefficientSet& cs, double r);

/// H'(r) = (2 alpha + d + O(1) eps(r))/r H + I/((alpha+1) r): residual of
/// the finite-difference H' against the closed formula, bounded by
/// C eps(r)/r H (exact up to fd/quadrature noise when eps == 0).
InequalityCheck check_H_derivative(const FrequencyProfile& profile,
                                   const CoefficientSet& cs);

/// The weighted Poincare (i), majorant bounds (ii)-(iii), and the I1 bound
/// (iv), each fitted with a single constant across the grid.
InequalityLedger check_aux_inequalities(const Solution& u,
                                        const CoefficientSet& cs,
                                        const FrequencyConfig& fc);

/// Interpolation-type trace inequality
///   int_Gamma u^2 w^(alpha+1) <= C (delta I1 + delta alpha H + r^2/delta H)
/// swept over the delta grid; one fitted constant.
InequalityCheck check_trace_inequality(const Solution& u,
                                       const CoefficientSet& cs, double r,
                                       double alpha,
                                       const std::vector<double>& delta_grid,
                                       const QuadratureSpec& spec = {});

/// Almost-monotonicity of N: fits the smallest admissible constant in
///   N' >= -C (eps~/r) N - C (eps~/r) (M r + alpha + M_eta^2),
/// builds the corrected Ntilde with it, checks Ntilde is nondecreasing, and
/// fits the constant of the N(r) <= ... corollary bound independently.
struct MonotonicityReport {
  InequalityCheck n_prime;       // fitted proposition constant
  std::vector<double> ntilde;    // corrected column on the grid
  bool ntilde_nondecreasing = true;
  double corollary_C = 0.0;      // minimal constant closing the N(r) bound
  bool corollary_holds = true;
};
MonotonicityReport check_monotonicity(const FrequencyProfile& profile,
                                      const CoefficientSet& cs,
                                      const FrequencyConfig& fc);

/// Second-variation bound: finite-difference I' against
///   (d+2 alpha)/r I - C eps~/r I - C eps~/r (Mr+alpha+M_eta^2) H
///   + 4(alpha+1)/r int (A Du . x)^2 mu^-1 w^alpha,
/// fitted C; equality up to tolerance when A = I, V = 0, eta = 0.
InequalityCheck check_second_variation(const Solution& u,
                                       const CoefficientSet& cs,
                                       const FrequencyConfig& fc);

/// int (A Du . x)^2 mu^-1 w^alpha, the Cauchy-Schwarz partner of I.
double energy_flux_square(const Solution& u, const CoefficientSet& cs,
                          double r, double alpha,
                          const QuadratureSpec& spec = {});

}  // namespace ucw
