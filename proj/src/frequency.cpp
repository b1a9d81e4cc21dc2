#include "ucw/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ucw/gauss.hpp"
#include "ucw/stable_sum.hpp"

namespace ucw {

namespace {

double eps_of(const CoefficientSet& cs, double r) {
  return cs.eps_modulus ? cs.eps_modulus(r) : 0.0;
}

}  // namespace

std::vector<double> FrequencyConfig::linear_grid(double lo, double hi,
                                                 int count) {
  if (count < 1) throw validation_error("grid: count must be >= 1");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return g;
}

std::vector<double> FrequencyConfig::log_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0))
    throw validation_error("grid: count >= 1 and lo > 0 required");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = count == 1 ? lo
                      : lo * std::pow(hi / lo, double(i) / (count - 1));
  return g;
}

void FrequencyConfig::validate() const {
  if (r_grid.empty()) throw validation_error("frequency: empty r grid");
  if (!(alpha >= 1.0))
    throw validation_error("frequency: alpha >= 1 required by the lemmas");
  double prev = 0.0;
  for (double r : r_grid) {
    if (!(r > prev) || r > 1.0 + 1e-12)
      throw validation_error("frequency: r grid must increase within (0, 1]");
    prev = r;
  }
}

double conformal_mu(const MatrixField& A, const Vec& x) {
  const double s2 = x.squaredNorm();
  if (s2 < 1e-24) {
    const Mat A0 = A(Vec::Zero(x.size()));
    if ((A0 - Mat::Identity(x.size(), x.size())).cwiseAbs().maxCoeff() > 1e-8)
      throw validation_error("conformal_mu at x=0 requires A(0) = I");
    return 1.0;
  }
  return x.dot(A(x) * x) / s2;
}

MuEval conformal_mu_with_grad(const Mat& A, const std::vector<Mat>& DA,
                              const Vec& x) {
  const double s2 = x.squaredNorm();
  if (s2 < 1e-24)
    throw validation_error("conformal_mu_with_grad: x = 0 is singular");
  MuEval out;
  const Vec Ax = A * x;
  out.mu = x.dot(Ax) / s2;
  const int d = static_cast<int>(x.size());
  out.grad = Vec(d);
  for (int i = 0; i < d; ++i)
    out.grad[i] = (x.dot(DA[i] * x) + 2.0 * Ax[i] - 2.0 * out.mu * x[i]) / s2;
  return out;
}

BetaEval beta_field(const CoefficientSet& cs, const Vec& x) {
  const CoefficientEval ce = eval(cs, x);
  const int d = cs.domain.dim;
  BetaEval out;
  if (x.squaredNorm() < 1e-24) {
    if ((ce.A - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
      throw validation_error("beta_field at x=0 requires A(0) = I");
    out.beta = Vec::Zero(d);
    out.jacobian = ce.A;
    return out;
  }
  const MuEval mu = conformal_mu_with_grad(ce.A, ce.DA, x);
  const Vec Ax = ce.A * x;
  out.beta = Ax / mu.mu;
  out.jacobian = Mat(d, d);
  for (int i = 0; i < d; ++i) {
    // d_i (A x)_k = sum_l (D_i a_kl) x_l + a_ki
    const Vec dAx = ce.DA[i] * x + ce.A.col(i);
    out.jacobian.col(i) = dAx / mu.mu - Ax * (mu.grad[i] / (mu.mu * mu.mu));
  }
  return out;
}

double height_H(const Solution& u, const CoefficientSet& cs, double r,
                double alpha, const QuadratureSpec& spec) {
  const QuadratureRule rule =
      QuadratureRule::halfball(cs.domain.dim, r, alpha, spec);
  return rule.integrate([&](const Vec& x) {
    const double ux = u.f.value(x);
    return ux * ux * conformal_mu(cs.A, x);
  });
}

double energy_I(const Solution& u, const CoefficientSet& cs, double r,
                double alpha, const QuadratureSpec& spec) {
  const QuadratureRule rule =
      QuadratureRule::halfball(cs.domain.dim, r, alpha, spec);
  return 2.0 * (alpha + 1.0) * rule.integrate([&](const Vec& x) {
    return (cs.A(x) * u.f.grad(x)).dot(x) * u.f.value(x);
  });
}

double energy_flux_square(const Solution& u, const CoefficientSet& cs,
                          double r, double alpha, const QuadratureSpec& spec) {
  const QuadratureRule rule =
      QuadratureRule::halfball(cs.domain.dim, r, alpha, spec);
  return rule.integrate([&](const Vec& x) {
    const double flux = (cs.A(x) * u.f.grad(x)).dot(x);
    return flux * flux / conformal_mu(cs.A, x);
  });
}

namespace {

EnergyDecomposition decomposition_pieces(const Solution& u,
                                         const CoefficientSet& cs, double r,
                                         double alpha,
                                         const QuadratureSpec& spec) {
  EnergyDecomposition out;
  const int d = cs.domain.dim;
  const QuadratureRule vol = QuadratureRule::halfball(d, r, alpha + 1.0, spec);
  {
    StableSum i1, i2, i2t;
    for (size_t i = 0; i < vol.points.size(); ++i) {
      const Vec& x = vol.points[i];
      const double w = vol.weights[i];
      const Vec du = u.f.grad(x);
      const double ux = u.f.value(x);
      const double vx = cs.V ? cs.V(x) : 0.0;
      i1.add(w * (cs.A(x) * du).dot(du));
      i2.add(w * vx * ux * ux);
      i2t.add(w * std::abs(vx) * ux * ux);
    }
    out.I1 = i1.get();
    out.I2 = i2.get();
    out.I2_tilde = i2t.get();
  }
  const QuadratureRule bdy = QuadratureRule::boundary(d, r, alpha + 1.0, spec);
  {
    StableSum i3, i3t;
    for (size_t i = 0; i < bdy.points.size(); ++i) {
      const Vec& x = bdy.points[i];
      const double w = bdy.weights[i];
      const double ux = u.f.value(x);
      const double ex = cs.eta ? cs.eta(x) : 0.0;
      i3.add(-w * ex * ux * ux);
      i3t.add(w * std::abs(ex) * ux * ux);
    }
    out.I3 = i3.get();
    out.I3_tilde = i3t.get();
  }
  return out;
}

}  // namespace

EnergyDecomposition energy_decomposition(const Solution& u,
                                         const CoefficientSet& cs, double r,
                                         double alpha,
                                         const QuadratureSpec& spec,
                                         double residual_threshold) {
  if (u.residual_estimate > residual_threshold)
    throw numerical_error(
        "energy_decomposition: weak-form residual too large; the identity "
        "I = I1 + I2 + I3 is only valid for solutions");
  return decomposition_pieces(u, cs, r, alpha, spec);
}

double frequency_N(const Solution& u, const CoefficientSet& cs, double r,
                   double alpha, const QuadratureSpec& spec, double h_floor) {
  const double H = height_H(u, cs, r, alpha, spec);
  if (!(H > h_floor))
    throw numerical_error("frequency_N: degenerate height H(r)");
  return energy_I(u, cs, r, alpha, spec) / H;
}

double epsilon_tilde_integral(const CoefficientSet& cs, double r) {
  if (!(r > 0.0)) return 0.0;
  const double cutoff = 1e-8;
  if (!cs.eps_modulus) return r;
  const double tail = adaptive_simpson(
      [&](double s) { return eps_of(cs, s) / s; }, std::min(cutoff, r), r,
      1e-11);
  return r + tail;
}

namespace {

struct SweepEvaluators {
  std::function<double(double)> H, I, N;
};

SweepEvaluators make_evaluators(const Solution& u, const CoefficientSet& cs,
                                double alpha, const QuadratureSpec& spec) {
  SweepEvaluators ev;
  ev.H = [&u, &cs, alpha, spec](double r) { return height_H(u, cs, r, alpha, spec); };
  ev.I = [&u, &cs, alpha, spec](double r) { return energy_I(u, cs, r, alpha, spec); };
  ev.N = [ev](double r) { return ev.I(r) / ev.H(r); };
  return ev;
}

// Central difference with one Richardson level.
double fd_richardson(const std::function<double(double)>& f, double r,
                     double h) {
  const double d1 = (f(r + h) - f(r - h)) / (2.0 * h);
  const double d2 = (f(r + 0.5 * h) - f(r - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

// Fits the proposition constant from the profile's finite-difference N'.
InequalityCheck fit_n_prime(const std::vector<RadiusSample>& rows,
                            const CoefficientSet& cs, double alpha) {
  InequalityCheck check;
  check.name = "almost-monotonicity N'";
  for (const RadiusSample& row : rows) {
    if (!row.valid) continue;
    const double eps_t = eps_of(cs, row.r) + row.r;
    InequalitySample s;
    s.r = row.r;
    s.lhs = -row.dN;
    s.fixed = 0.0;
    s.basis = eps_t / row.r *
              (row.N + cs.M * row.r + alpha + cs.M_eta * cs.M_eta);
    // fd noise floor on N' scales with N/r
    check.add(s);
  }
  check.fit(1e-7, 1e-9);
  return check;
}

std::vector<double> build_ntilde(const std::vector<RadiusSample>& rows,
                                 const CoefficientSet& cs, double alpha,
                                 double C) {
  std::vector<double> out(rows.size(), 0.0);
  const double cutoff = 1e-8;
  for (size_t i = 0; i < rows.size(); ++i) {
    const double r = rows[i].r;
    const double E = epsilon_tilde_integral(cs, r);
    const double inner = adaptive_simpson(
        [&](double s) {
          const double eps_t = eps_of(cs, s) + s;
          return eps_t / s * (cs.M * s + alpha + cs.M_eta * cs.M_eta) *
                 std::exp(C * epsilon_tilde_integral(cs, s));
        },
        cutoff, r, 1e-10);
    out[i] = rows[i].N * std::exp(C * E) + C * inner;
  }
  return out;
}

}  // namespace

FrequencyProfile build_profile(const Solution& u, const CoefficientSet& cs,
                               const FrequencyConfig& fc) {
  fc.validate();
  FrequencyProfile profile;
  profile.config = fc;
  const SweepEvaluators ev = make_evaluators(u, cs, fc.alpha, fc.quad);

  profile.rows.reserve(fc.r_grid.size());
  for (double r : fc.r_grid) {
    RadiusSample row;
    row.r = r;
    row.H = ev.H(r);
    row.I = ev.I(r);
    const EnergyDecomposition dec =
        decomposition_pieces(u, cs, r, fc.alpha, fc.quad);
    row.I1 = dec.I1;
    row.I2 = dec.I2;
    row.I3 = dec.I3;
    row.I2_tilde = dec.I2_tilde;
    row.I3_tilde = dec.I3_tilde;
    profile.rows.push_back(row);
    profile.H_max = std::max(profile.H_max, row.H);
  }

  for (RadiusSample& row : profile.rows) {
    row.valid = row.H >= fc.h_degeneracy_rel * profile.H_max &&
                profile.H_max > 0.0;
    const double h = fc.fd_step_rel * row.r;
    row.dH = fd_richardson(ev.H, row.r, h);
    row.dI = fd_richardson(ev.I, row.r, h);
    if (row.valid) {
      row.N = row.I / row.H;
      row.dN = fd_richardson(ev.N, row.r, h);
    }
  }

  const InequalityCheck prop = fit_n_prime(profile.rows, cs, fc.alpha);
  const std::vector<double> ntilde =
      build_ntilde(profile.rows, cs, fc.alpha, prop.fitted_C);
  for (size_t i = 0; i < profile.rows.size(); ++i)
    profile.rows[i].Ntilde = ntilde[i];
  return profile;
}

void FrequencyProfile::write_csv(std::ostream& os) const {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << "r,H,I,I1,I2,I3,I2tilde,I3tilde,N,Ntilde,Hprime,Iprime,Nprime,valid\n";
  for (const RadiusSample& w : rows)
    os << fmt(w.r) << "," << fmt(w.H) << "," << fmt(w.I) << "," << fmt(w.I1)
       << "," << fmt(w.I2) << "," << fmt(w.I3) << "," << fmt(w.I2_tilde) << ","
       << fmt(w.I3_tilde) << "," << fmt(w.N) << "," << fmt(w.Ntilde) << ","
       << fmt(w.dH) << "," << fmt(w.dI) << "," << fmt(w.dN) << ","
       << (w.valid ? 1 : 0) << "\n";
}

InequalityCheck check_H_derivative(const FrequencyProfile& profile,
                                   const CoefficientSet& cs) {
  const double d = cs.domain.dim;
  const double alpha = profile.config.alpha;
  InequalityCheck check;
  check.name = "H' identity";
  for (const RadiusSample& row : profile.rows) {
    if (!row.valid) continue;
    const double formula =
        (2.0 * alpha + d) / row.r * row.H + row.I / ((alpha + 1.0) * row.r);
    InequalitySample s;
    s.r = row.r;
    s.lhs = std::abs(row.dH - formula);
    // numerical floor for the fd + quadrature error of both sides
    s.fixed = 1e-7 * (std::abs(row.dH) + std::abs(formula));
    s.basis = eps_of(cs, row.r) / row.r * row.H;
    check.add(s);
  }
  check.fit();
  return check;
}

InequalityLedger check_aux_inequalities(const Solution& u,
                                        const CoefficientSet& cs,
                                        const FrequencyConfig& fc) {
  fc.validate();
  const double alpha = fc.alpha;
  const int d = cs.domain.dim;
  InequalityLedger ledger;
  InequalityCheck poincare;
  poincare.name = "weighted Poincare";
  InequalityCheck majorant2;
  majorant2.name = "majorant I2~";
  InequalityCheck majorant3;
  majorant3.name = "majorant I3~";
  InequalityCheck i1bound;
  i1bound.name = "I1 bound";

  for (double r : fc.r_grid) {
    const EnergyDecomposition dec = decomposition_pieces(u, cs, r, alpha, fc.quad);
    const double H = height_H(u, cs, r, alpha, fc.quad);
    const double I = energy_I(u, cs, r, alpha, fc.quad);

    {
      const QuadratureRule rule =
          QuadratureRule::halfball(d, r, alpha - 1.0, fc.quad);
      const double lhs = alpha * alpha * rule.integrate([&](const Vec& x) {
        const double ux = u.f.value(x);
        return ux * ux * x.squaredNorm();
      });
      poincare.add({r, 0.0, u.name, lhs, 0.0, alpha * H + dec.I1});
    }
    majorant2.add({r, 0.0, u.name, dec.I2_tilde, 0.0,
                   cs.M / cs.lambda * r * r * H});
    {
      const QuadratureRule bdy =
          QuadratureRule::boundary(d, r, alpha + 1.0, fc.quad);
      const double slope_term = bdy.integrate([&](const Vec& x) {
        const double ux = u.f.value(x);
        const BetaEval be = beta_field(cs, x);
        const EtaEval ee = eval_eta(cs, x);
        return ux * ux * std::abs(be.beta.dot(ee.grad_tangential));
      });
      majorant3.add({r, 0.0, u.name, dec.I3_tilde + slope_term,
                     0.5 * r * dec.I1 + 0.5 * alpha * r * H,
                     cs.M_eta * cs.M_eta * r * H});
    }
    i1bound.add({r, 0.0, u.name, dec.I1, 2.0 * I,
                 (cs.M * r * r + alpha * r + cs.M_eta * cs.M_eta * r) * H});
  }
  for (InequalityCheck* c : {&poincare, &majorant2, &majorant3, &i1bound}) {
    c->fit();
    ledger.checks.push_back(std::move(*c));
  }
  return ledger;
}

InequalityCheck check_trace_inequality(const Solution& u,
                                       const CoefficientSet& cs, double r,
                                       double alpha,
                                       const std::vector<double>& delta_grid,
                                       const QuadratureSpec& spec) {
  InequalityCheck check;
  check.name = "trace inequality";
  const int d = cs.domain.dim;
  const QuadratureRule bdy = QuadratureRule::boundary(d, r, alpha + 1.0, spec);
  const double lhs = bdy.integrate([&](const Vec& x) {
    const double ux = u.f.value(x);
    return ux * ux;
  });
  const double H = height_H(u, cs, r, alpha, spec);
  const EnergyDecomposition dec = decomposition_pieces(u, cs, r, alpha, spec);
  for (double delta : delta_grid) {
    if (!(delta > 0.0))
      throw validation_error("check_trace_inequality: delta must be > 0");
    InequalitySample s;
    s.r = r;
    s.extra = delta;
    s.tag = u.name;
    s.lhs = lhs;
    s.fixed = 0.0;
    s.basis = delta * dec.I1 + delta * alpha * H + r * r / delta * H;
    check.add(s);
  }
  check.fit();
  return check;
}

MonotonicityReport check_monotonicity(const FrequencyProfile& profile,
                                      const CoefficientSet& cs,
                                      const FrequencyConfig& fc) {
  MonotonicityReport report;
  report.n_prime = fit_n_prime(profile.rows, cs, fc.alpha);
  report.ntilde =
      build_ntilde(profile.rows, cs, fc.alpha, report.n_prime.fitted_C);

  double ntilde_scale = 1.0;
  for (double v : report.ntilde) ntilde_scale = std::max(ntilde_scale, std::abs(v));
  const double tol = 1e-6 * ntilde_scale;
  for (size_t i = 0; i + 1 < report.ntilde.size(); ++i) {
    if (!profile.rows[i].valid || !profile.rows[i + 1].valid) continue;
    if (report.ntilde[i + 1] < report.ntilde[i] - tol)
      report.ntilde_nondecreasing = false;
  }

  // Corollary constant: smallest C with
  //   max_grid N <= (N(1))_+ e^(C(I_eps+1)) + C(I_eps+1)e^(C(I_eps+1))(M+alpha+M_eta^2),
  // where N(1) is read at the top grid radius. The bound is increasing in
  // C, so bisection applies.
  double n_top = 0.0, n_max = -std::numeric_limits<double>::infinity();
  bool any_valid = false;
  for (const RadiusSample& row : profile.rows) {
    if (!row.valid) continue;
    any_valid = true;
    n_top = row.N;
    n_max = std::max(n_max, row.N);
  }
  if (!any_valid) {
    report.corollary_C = 0.0;
    return report;
  }
  const double npos = std::max(n_top, 0.0);
  const double c1 = cs.I_eps + 1.0;
  const double mass = cs.M + fc.alpha + cs.M_eta * cs.M_eta;
  auto bound = [&](double C) {
    return npos * std::exp(C * c1) + C * c1 * std::exp(C * c1) * mass;
  };
  if (bound(0.0) >= n_max) {
    report.corollary_C = 0.0;
  } else {
    double lo = 0.0, hi = 1.0;
    while (bound(hi) < n_max && hi < 1e6) hi *= 2.0;
    if (bound(hi) < n_max) {
      report.corollary_holds = false;
      report.corollary_C = hi;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (bound(mid) >= n_max ? hi : lo) = mid;
      }
      report.corollary_C = hi;
    }
  }
  return report;
}

InequalityCheck check_second_variation(const Solution& u,
                                       const CoefficientSet& cs,
                                       const FrequencyConfig& fc) {
  fc.validate();
  const double alpha = fc.alpha;
  const double d = cs.domain.dim;
  const SweepEvaluators ev = make_evaluators(u, cs, alpha, fc.quad);
  InequalityCheck check;
  check.name = "second variation I'";
  for (double r : fc.r_grid) {
    const double I = ev.I(r);
    const double H = ev.H(r);
    const double Q = energy_flux_square(u, cs, r, alpha, fc.quad);
    const double dI = fd_richardson(ev.I, r, fc.fd_step_rel * r);
    const double eps_t = eps_of(cs, r) + r;
    InequalitySample s;
    s.r = r;
    s.tag = u.name;
    s.lhs = (d + 2.0 * alpha) / r * I + 4.0 * (alpha + 1.0) / r * Q - dI;
    s.fixed = 1e-6 * (std::abs(dI) + std::abs(I) / r + Q / r);
    s.basis = eps_t / r * (I + (cs.M * r + alpha + cs.M_eta * cs.M_eta) * H);
    check.add(s);
  }
  check.fit(1e-7, 1e-9);
  return check;
}

}  // namespace ucw
