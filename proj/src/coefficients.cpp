#include "ucw/coefficients.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ucw {

namespace {

constexpr double kPi = 3.14159265358979323846;

double fd_step(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }

// 4th-order central difference of a scalar closure along direction k.
template <typename F>
double central4(const F& f, const Vec& x, int k, double h) {
  Vec xp = x, xm = x, xpp = x, xmm = x;
  xp[k] += h;
  xm[k] -= h;
  xpp[k] += 2.0 * h;
  xmm[k] -= 2.0 * h;
  return (-f(xpp) + 8.0 * f(xp) - 8.0 * f(xm) + f(xmm)) / (12.0 * h);
}

std::vector<Mat> fd_matrix_derivative(const MatrixField& A, const Vec& x) {
  const int d = static_cast<int>(x.size());
  const double h = fd_step(x);
  std::vector<Mat> out(d);
  for (int k = 0; k < d; ++k) {
    Vec xp = x, xm = x, xpp = x, xmm = x;
    xp[k] += h;
    xm[k] -= h;
    xpp[k] += 2.0 * h;
    xmm[k] -= 2.0 * h;
    out[k] = (-A(xpp) + 8.0 * A(xp) - 8.0 * A(xm) + A(xmm)) / (12.0 * h);
  }
  return out;
}

Vec fd_gradient(const ScalarField& f, const Vec& x) {
  const int d = static_cast<int>(x.size());
  const double h = fd_step(x);
  Vec g(d);
  for (int k = 0; k < d; ++k) g[k] = central4(f, x, k, h);
  return g;
}

void require_symmetric(const Mat& A) {
  const double scale = A.cwiseAbs().maxCoeff() + 1e-30;
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw numerical_error("coefficient matrix is not symmetric");
}

// Deterministic quasi-uniform half-ball samples: polar shells with a fixed
// golden-angle stagger.
std::vector<Vec> halfball_samples(const HalfBallDomain& dom, int count) {
  std::vector<Vec> pts;
  pts.reserve(count);
  const int n_shell = std::max(4, static_cast<int>(std::sqrt(double(count))));
  const int n_ang = std::max(4, count / n_shell);
  for (int i = 0; i < n_shell; ++i) {
    const double s = dom.r_max * (i + 0.5) / n_shell;
    for (int j = 0; j < n_ang; ++j) {
      const double theta =
          kPi * std::fmod(j + 0.5 + 0.38196601125 * i, double(n_ang)) / n_ang;
      if (dom.dim == 2) {
        pts.push_back(vec2(s * std::cos(theta), s * std::sin(theta)));
      } else {
        Vec x(3);
        const double t = (j + 0.5) / n_ang;  // cos(polar) in (0,1)
        const double sp = std::sqrt(1.0 - t * t);
        const double psi = 2.0 * kPi * std::fmod(0.61803398875 * (i * n_ang + j), 1.0);
        x << s * sp * std::cos(psi), s * sp * std::sin(psi), s * t;
        pts.push_back(x);
      }
      if (static_cast<int>(pts.size()) >= count) return pts;
    }
  }
  return pts;
}

double entry_grad_norm(const std::vector<Mat>& DA, int i, int j) {
  double sq = 0.0;
  for (const Mat& Dk : DA) sq += Dk(i, j) * Dk(i, j);
  return std::sqrt(sq);
}

}  // namespace

CoefficientEval eval(const CoefficientSet& cs, const Vec& x) {
  if (!cs.domain.contains(x))
    throw validation_error("eval: point outside the closed domain");
  CoefficientEval out;
  out.A = cs.A(x);
  require_symmetric(out.A);
  out.DA = cs.DA ? cs.DA(x) : fd_matrix_derivative(cs.A, x);
  out.V = cs.V ? cs.V(x) : 0.0;
  if (cs.DV)
    out.DV = cs.DV(x);
  else if (cs.V)
    out.DV = fd_gradient(cs.V, x);
  else
    out.DV = Vec::Zero(x.size());
  return out;
}

EtaEval eval_eta(const CoefficientSet& cs, const Vec& xb) {
  if (!cs.domain.on_flat_boundary(xb, 1e-9))
    throw validation_error("eval_eta: point not on the flat boundary");
  EtaEval out;
  out.eta = cs.eta ? cs.eta(xb) : 0.0;
  const int d = cs.domain.dim;
  if (cs.eta_tangential_grad) {
    out.grad_tangential = cs.eta_tangential_grad(xb);
  } else if (cs.eta) {
    out.grad_tangential = Vec::Zero(d);
    const double h = fd_step(xb);
    for (int k = 0; k + 1 < d; ++k)
      out.grad_tangential[k] = central4(cs.eta, xb, k, h);
  } else {
    out.grad_tangential = Vec::Zero(d);
  }
  out.grad_tangential[d - 1] = 0.0;
  return out;
}

double BoundsEstimate::eps_at(double r) const {
  if (eps_hat.empty() || r <= 0.0) return 0.0;
  if (r <= eps_hat.front().first)
    return eps_hat.front().second * r / eps_hat.front().first;
  for (size_t k = 0; k + 1 < eps_hat.size(); ++k) {
    const auto& [r0, e0] = eps_hat[k];
    const auto& [r1, e1] = eps_hat[k + 1];
    if (r <= r1) return e0 + (e1 - e0) * (r - r0) / (r1 - r0);
  }
  return eps_hat.back().second;
}

BoundsEstimate estimate_bounds(const CoefficientSet& cs, int sample_count) {
  BoundsEstimate out;
  const int d = cs.domain.dim;

  double eig_lo = std::numeric_limits<double>::infinity();
  double eig_hi = 0.0;
  double v_sup = 0.0, dv_sup = 0.0;
  for (const Vec& x : halfball_samples(cs.domain, sample_count)) {
    const CoefficientEval ce = eval(cs, x);
    Eigen::SelfAdjointEigenSolver<Mat> es(ce.A);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0))
      throw numerical_error("estimate_bounds: ellipticity violation (non-positive eigenvalue)");
    eig_lo = std::min(eig_lo, lo);
    eig_hi = std::max(eig_hi, hi);
    v_sup = std::max(v_sup, std::abs(ce.V));
    dv_sup = std::max(dv_sup, ce.DV.norm());
  }
  out.lambda_hat = std::min(eig_lo, 1.0 / eig_hi);
  out.M_hat = v_sup + dv_sup;

  double e_sup = 0.0, de_sup = 0.0;
  const int nb = 64;
  for (int j = 0; j < nb; ++j) {
    Vec xb = Vec::Zero(d);
    xb[0] = cs.domain.r_max * (-1.0 + 2.0 * (j + 0.5) / nb);
    const EtaEval ee = eval_eta(cs, xb);
    e_sup = std::max(e_sup, std::abs(ee.eta));
    de_sup = std::max(de_sup, ee.grad_tangential.norm());
  }
  out.M_eta_hat = e_sup + de_sup;

  // eps_hat(r) = sup over the annulus {|x| in [r/2, r]} of |x| |DA(x)|,
  // dyadic annuli, 64 samples each (8 radii x 8 angles; d=2 pattern also
  // used to seed d=3 azimuths).
  const double r_top = std::min(1.0, cs.domain.r_max);
  const int n_annuli = 14;
  std::vector<std::pair<double, double>> table;
  for (int k = n_annuli - 1; k >= 0; --k) {
    const double r = r_top * std::pow(2.0, -k);
    double sup = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double s = r * (0.5 + 0.5 * (i + 0.5) / 8.0);
      for (int j = 0; j < 8; ++j) {
        const double theta = kPi * std::fmod(j + 0.5 + 0.118 * i, 8.0) / 8.0;
        Vec x;
        if (d == 2) {
          x = vec2(s * std::cos(theta), s * std::sin(theta));
        } else {
          x = Vec::Zero(d);
          x[0] = s * std::cos(theta);
          x[d - 1] = s * std::sin(theta);
        }
        const CoefficientEval ce = eval(cs, x);
        double g = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            g = std::max(g, entry_grad_norm(ce.DA, a, b));
        sup = std::max(sup, s * g);
      }
    }
    table.emplace_back(r, sup);
  }
  out.eps_hat = std::move(table);

  // I_eps by exact integration of the piecewise-linear interpolant of
  // eps_hat with eps(0) = 0: over [0, r_min] a linear ramp contributes its
  // endpoint value; over [r_k, r_k+1] write eps = a + b s and integrate
  // a/s + b in closed form.
  double integral = out.eps_hat.front().second;
  for (size_t k = 0; k + 1 < out.eps_hat.size(); ++k) {
    const auto& [r0, e0] = out.eps_hat[k];
    const auto& [r1, e1] = out.eps_hat[k + 1];
    const double b = (e1 - e0) / (r1 - r0);
    const double a = e0 - b * r0;
    integral += a * std::log(r1 / r0) + b * (r1 - r0);
  }
  out.I_eps_hat = integral;
  return out;
}

CoefficientSet manufacture_from_solution(const SmoothFunction& u,
                                         const MatrixField& A,
                                         const MatrixDerivField& DA,
                                         const HalfBallDomain& domain,
                                         double u_min) {
  if (!u.value || !u.grad)
    throw validation_error("manufacture_from_solution: u and Du required");

  double u_max = 0.0, u_abs_min = std::numeric_limits<double>::infinity();
  for (const Vec& x : halfball_samples(domain, 512)) {
    const double ux = std::abs(u.value(x));
    u_max = std::max(u_max, ux);
    u_abs_min = std::min(u_abs_min, ux);
  }
  const double threshold = u_min > 0.0 ? u_min : 1e-6 * u_max;
  if (u_abs_min < threshold)
    throw numerical_error(
        "manufacture_from_solution: |u| falls below the division threshold");

  MatrixField A_field = A ? A : MatrixField([d = domain.dim](const Vec&) {
    return Mat::Identity(d, d);
  });
  MatrixDerivField DA_field =
      DA ? DA : MatrixDerivField([A_field](const Vec& x) {
        return fd_matrix_derivative(A_field, x);
      });

  SmoothFunction uc = u;  // captured by the closures below
  if (!uc.hess) {
    VectorField g = uc.grad;
    uc.hess = [g](const Vec& x) {
      const int d = static_cast<int>(x.size());
      const double h = fd_step(x);
      Mat H(d, d);
      for (int k = 0; k < d; ++k) {
        Vec xp = x, xm = x, xpp = x, xmm = x;
        xp[k] += h;
        xm[k] -= h;
        xpp[k] += 2.0 * h;
        xmm[k] -= 2.0 * h;
        H.col(k) = (-g(xpp) + 8.0 * g(xp) - 8.0 * g(xm) + g(xmm)) / (12.0 * h);
      }
      return Mat(0.5 * (H + H.transpose()));
    };
  }

  CoefficientSet cs;
  cs.name = "manufactured";
  cs.domain = domain;
  cs.A = A_field;
  cs.DA = DA_field;
  cs.V = [uc, A_field, DA_field](const Vec& x) {
    const Mat Ax = A_field(x);
    const std::vector<Mat> DAx = DA_field(x);
    const Vec du = uc.grad(x);
    const Mat hu = uc.hess(x);
    // div(A Du) = sum_ij d_i a_ij d_j u + a_ij d_ij u
    double div = (Ax.array() * hu.array()).sum();
    for (int i = 0; i < Ax.rows(); ++i) div += DAx[i].row(i).dot(du);
    return div / uc.value(x);
  };
  cs.eta = [uc, A_field, dd = domain.dim](const Vec& xb) {
    const Vec flux = A_field(xb) * uc.grad(xb);
    return -flux[dd - 1] / uc.value(xb);  // n = -e_d on Gamma
  };

  const BoundsEstimate be = estimate_bounds(cs, 512);
  cs.lambda = be.lambda_hat;
  cs.M = be.M_hat;
  cs.M_eta = be.M_eta_hat;
  cs.eps_modulus = [be](double r) { return be.eps_at(r); };
  cs.I_eps = be.I_eps_hat;
  return cs;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

CoefficientSet base_set(const std::string& name,
                        const std::map<std::string, double>& params) {
  CoefficientSet cs;
  cs.name = name;
  cs.domain.dim = static_cast<int>(param(params, "dim", 2));
  cs.domain.r_max = param(params, "radius", 2.0);
  const double v0 = param(params, "v0", 0.0);
  const double eta0 = param(params, "eta0", 0.0);
  const int d = cs.domain.dim;
  cs.V = [v0](const Vec&) { return v0; };
  cs.DV = [d](const Vec&) { return Vec::Zero(d); };
  cs.eta = [eta0](const Vec&) { return eta0; };
  cs.eta_tangential_grad = [d](const Vec&) { return Vec::Zero(d); };
  cs.M = std::abs(v0);
  cs.M_eta = std::abs(eta0);
  cs.eps_modulus = [](double) { return 0.0; };
  cs.I_eps = 0.0;
  return cs;
}

std::vector<Mat> zero_deriv(int d) { return std::vector<Mat>(d, Mat::Zero(d, d)); }

}  // namespace

CoefficientSet builtin_coefficients(const std::string& name,
                                    const std::map<std::string, double>& params) {
  CoefficientSet cs = base_set(name, params);
  const int d = cs.domain.dim;

  if (name == "identity") {
    cs.A = [d](const Vec&) { return Mat::Identity(d, d); };
    cs.DA = [d](const Vec&) { return zero_deriv(d); };
    cs.lambda = 1.0;
    return cs;
  }

  if (name == "constant") {
    if (d != 2)
      throw validation_error("builtin 'constant' is built for d=2");
    Mat A0(2, 2);
    A0 << param(params, "a11", 1.0), param(params, "a12", 0.0),
        param(params, "a12", 0.0), param(params, "a22", 1.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(A0);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw validation_error("builtin 'constant': matrix is not positive definite");
    cs.A = [A0](const Vec&) { return A0; };
    cs.DA = [d](const Vec&) { return zero_deriv(d); };
    cs.lambda = std::min(es.eigenvalues().minCoeff(),
                         1.0 / es.eigenvalues().maxCoeff());
    return cs;
  }

  if (name == "block" || name == "lipschitz-perturb") {
    const double c = name == "block" ? param(params, "c", 0.1)
                                     : param(params, "L", 0.1);
    if (!(c >= 0.0 && c < 0.95))
      throw validation_error("builtin '" + name + "': parameter must lie in [0, 0.95)");
    if (name == "block") {
      // Diagonal-block field: a_di = 0 for i < d, so <A(x)x, n> = 0 on the
      // flat boundary; A(0) = I.
      cs.A = [c, d](const Vec& x) {
        Mat A = Mat::Identity(d, d);
        A(0, 0) += c * std::sin(x[0]) * std::cos(x[d - 1]);
        A(d - 1, d - 1) += c * std::sin(x[d - 1]);
        if (d == 3) {
          const double off = c * std::sin(x[0] + x[1]);
          A(0, 1) += off;
          A(1, 0) += off;
        }
        return A;
      };
      cs.DA = [c, d](const Vec& x) {
        std::vector<Mat> D = zero_deriv(d);
        D[0](0, 0) = c * std::cos(x[0]) * std::cos(x[d - 1]);
        D[d - 1](0, 0) = -c * std::sin(x[0]) * std::sin(x[d - 1]);
        D[d - 1](d - 1, d - 1) = c * std::cos(x[d - 1]);
        if (d == 3) {
          const double doff = c * std::cos(x[0] + x[1]);
          D[0](0, 1) = D[0](1, 0) = doff;
          D[1](0, 1) = D[1](1, 0) = doff;
        }
        return D;
      };
    } else {
      cs.A = [c, d](const Vec& x) {
        Mat A = Mat::Identity(d, d);
        for (int k = 0; k < d; ++k) A(k, k) += c * std::sin(x[k]);
        return A;
      };
      cs.DA = [c, d](const Vec& x) {
        std::vector<Mat> D = zero_deriv(d);
        for (int k = 0; k < d; ++k) D[k](k, k) = c * std::cos(x[k]);
        return D;
      };
    }
    const double lip = (name == "block" && d == 3) ? 2.0 * c : c;
    cs.lambda = std::min(1.0 - lip, 1.0 / (1.0 + lip));
    if (!(cs.lambda > 0.0))
      throw validation_error("builtin '" + name + "': perturbation too large");
    cs.eps_modulus = [lip](double r) { return lip * r; };
    cs.I_eps = lip;
    return cs;
  }

  throw validation_error("unknown coefficient builtin '" + name + "'");
}

std::vector<std::string> coefficient_catalogue() {
  return {"block", "constant", "identity", "lipschitz-perturb"};
}

}  // namespace ucw
