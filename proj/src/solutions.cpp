#include "ucw/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ucw/stable_sum.hpp"

namespace ucw {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::complex<double> zpow(double x, double y, int n) {
  std::complex<double> z(x, y), acc(1.0, 0.0);
  for (int i = 0; i < n; ++i) acc *= z;
  return acc;
}

std::shared_ptr<CoefficientSet> constant_problem(double radius, double V,
                                                 double eta) {
  auto cs = std::make_shared<CoefficientSet>(builtin_coefficients(
      "identity", {{"radius", radius}, {"v0", V}, {"eta0", eta}}));
  return cs;
}

Solution homogeneous_solution(int k, double radius) {
  Solution sol;
  sol.name = "homogeneous(k=" + std::to_string(k) + ")";
  sol.f.value = [k](const Vec& x) { return zpow(x[0], x[1], k).real(); };
  sol.f.grad = [k](const Vec& x) {
    if (k == 0) return Vec(Vec::Zero(2));
    const auto zk1 = zpow(x[0], x[1], k - 1);
    return vec2(k * zk1.real(), -k * zk1.imag());
  };
  sol.f.hess = [k](const Vec& x) {
    Mat H = Mat::Zero(2, 2);
    if (k >= 2) {
      const auto zk2 = zpow(x[0], x[1], k - 2);
      const double c = double(k) * (k - 1);
      H(0, 0) = c * zk2.real();
      H(0, 1) = H(1, 0) = -c * zk2.imag();
      H(1, 1) = -c * zk2.real();
    }
    return H;
  };
  sol.problem = constant_problem(radius, 0.0, 0.0);
  return sol;
}

// u = cos(k x1) e^(m x2): harmonic-family entry with V = m^2 - k^2 and
// eta = -m, both constant.
Solution cosexp_solution(double k, double m, double radius, std::string name) {
  Solution sol;
  sol.name = std::move(name);
  sol.f.value = [k, m](const Vec& x) {
    return std::cos(k * x[0]) * std::exp(m * x[1]);
  };
  sol.f.grad = [k, m](const Vec& x) {
    const double e = std::exp(m * x[1]);
    return vec2(-k * std::sin(k * x[0]) * e, m * std::cos(k * x[0]) * e);
  };
  sol.f.hess = [k, m](const Vec& x) {
    const double e = std::exp(m * x[1]);
    const double c = std::cos(k * x[0]), s = std::sin(k * x[0]);
    Mat H(2, 2);
    H << -k * k * c * e, -k * m * s * e, -k * m * s * e, m * m * c * e;
    return H;
  };
  sol.problem = constant_problem(radius, m * m - k * k, -m);
  return sol;
}

Solution tilted_solution(double m, double c, double radius) {
  Solution sol;
  sol.name = "robin-tilted(m=" + std::to_string(m) + ",c=" + std::to_string(c) + ")";
  sol.f.value = [m, c](const Vec& x) {
    return std::exp(m * x[1] + c * x[0] * x[1]);
  };
  sol.f.grad = [m, c](const Vec& x) {
    const double u = std::exp(m * x[1] + c * x[0] * x[1]);
    return vec2(c * x[1] * u, (m + c * x[0]) * u);
  };
  sol.f.hess = [m, c](const Vec& x) {
    const double u = std::exp(m * x[1] + c * x[0] * x[1]);
    const double a = c * x[1], b = m + c * x[0];
    Mat H(2, 2);
    H << a * a * u, (c + a * b) * u, (c + a * b) * u, b * b * u;
    return H;
  };

  CoefficientSet cs = builtin_coefficients("identity", {{"radius", radius}});
  cs.name = "tilted-robin-coefficients";
  cs.V = [m, c](const Vec& x) {
    const double a = c * x[1], b = m + c * x[0];
    return a * a + b * b;
  };
  cs.DV = [m, c](const Vec& x) {
    return vec2(2.0 * c * (m + c * x[0]), 2.0 * c * c * x[1]);
  };
  cs.eta = [m, c](const Vec& xb) { return -(m + c * xb[0]); };
  cs.eta_tangential_grad = [c](const Vec&) { return vec2(-c, 0.0); };
  const BoundsEstimate be = estimate_bounds(cs, 512);
  cs.M = be.M_hat;
  cs.M_eta = be.M_eta_hat;
  sol.problem = std::make_shared<CoefficientSet>(std::move(cs));
  return sol;
}

Solution eigen_solution(double sigma, double radius) {
  const double lam = first_robin_disk_eigenvalue(sigma);
  const double sq = std::sqrt(lam);
  Solution sol;
  sol.name = "robin-eigen(sigma=" + std::to_string(sigma) + ")";
  sol.f.value = [sq](const Vec& x) { return std::cyl_bessel_j(0, sq * x.norm()); };
  sol.f.grad = [sq](const Vec& x) {
    const double s = x.norm();
    if (s < 1e-14) return Vec(Vec::Zero(2));
    const double up = -sq * std::cyl_bessel_j(1, sq * s);
    return Vec(up * x / s);
  };
  sol.f.hess = [sq, lam](const Vec& x) {
    const double s = x.norm();
    if (s < 1e-7) return Mat(-0.5 * lam * Mat::Identity(2, 2));
    const double j0 = std::cyl_bessel_j(0, sq * s);
    const double j1 = std::cyl_bessel_j(1, sq * s);
    const double up = -sq * j1;                      // u'(s)
    const double upp = -lam * j0 + sq * j1 / s;      // u''(s)
    const Vec e = x / s;
    Mat H = upp * e * e.transpose() +
            (up / s) * (Mat::Identity(2, 2) - e * e.transpose());
    return H;
  };
  sol.problem = constant_problem(radius, -lam, 0.0);
  return sol;
}

// Pointwise PDE + Robin residual on a deterministic sample set, used as the
// analytic entries' residual estimate.
double pointwise_residual(const Solution& sol, int n_samples) {
  const CoefficientSet& cs = *sol.problem;
  double worst = 0.0;
  const int n_shell = 8, n_ang = n_samples / n_shell;
  for (int i = 0; i < n_shell; ++i) {
    const double s = cs.domain.r_max * (i + 0.5) / n_shell;
    for (int j = 0; j < n_ang; ++j) {
      const double th = 3.14159265358979323846 * (j + 0.5) / n_ang;
      const Vec x = vec2(s * std::cos(th), s * std::sin(th));
      const CoefficientEval ce = eval(cs, x);
      const Mat H = sol.f.hess(x);
      const Vec g = sol.f.grad(x);
      double div = (ce.A.array() * H.array()).sum();
      for (int a = 0; a < 2; ++a) div += ce.DA[a].row(a).dot(g);
      worst = std::max(worst, std::abs(div - ce.V * sol.u(x)));
    }
  }
  for (int j = 0; j < 32; ++j) {
    const Vec xb = vec2(cs.domain.r_max * (-1.0 + (2.0 * j + 1.0) / 32.0), 0.0);
    const Vec flux = cs.A(xb) * sol.f.grad(xb);
    worst = std::max(worst,
                     std::abs(-flux[1] - cs.eta(xb) * sol.u(xb)));
  }
  return worst;
}

}  // namespace

Solution analytic_solution(const std::string& name,
                           const std::map<std::string, double>& params) {
  const double radius = param(params, "radius", 2.0);
  Solution sol;
  if (name == "homogeneous") {
    const double kd = param(params, "k", 1.0);
    const int k = static_cast<int>(kd);
    if (k < 0 || kd != k)
      throw validation_error("homogeneous: k must be a nonnegative integer");
    sol = homogeneous_solution(k, radius);
  } else if (name == "one") {
    sol = homogeneous_solution(0, radius);
    sol.name = "one";
  } else if (name == "robin-cosexp") {
    const double k = param(params, "k", 1.0);
    sol = cosexp_solution(k, param(params, "m", k), radius,
                          "robin-cosexp(k=" + std::to_string(k) + ")");
  } else if (name == "robin-cosexp-decay") {
    const double k = param(params, "k", 1.0);
    sol = cosexp_solution(k, -k, radius,
                          "robin-cosexp-decay(k=" + std::to_string(k) + ")");
  } else if (name == "robin-exponential") {
    const double eta0 = param(params, "eta0", 1.0);
    sol = cosexp_solution(0.0, eta0, radius,
                          "robin-exponential(eta0=" + std::to_string(eta0) + ")");
  } else if (name == "robin-tilted") {
    sol = tilted_solution(param(params, "m", 1.0), param(params, "c", 0.5),
                          radius);
  } else if (name == "robin-eigen") {
    sol = eigen_solution(param(params, "sigma", 1.0), radius);
  } else {
    throw validation_error("unknown solution builtin '" + name + "'");
  }
  sol.provenance = Provenance::analytic;
  sol.residual_estimate = pointwise_residual(sol, 256);
  return sol;
}

std::vector<std::string> solution_catalogue() {
  return {"homogeneous",       "one",
          "robin-cosexp",      "robin-cosexp-decay",
          "robin-eigen",       "robin-exponential",
          "robin-tilted"};
}

double first_robin_disk_eigenvalue(double sigma) {
  if (!(sigma > 0.0))
    throw validation_error("first_robin_disk_eigenvalue: sigma must be > 0");

  // Shoot v'' + v'/s + lam v = 0 from a series start near s = 0 and report
  // the Robin defect at s = 1.
  auto defect = [sigma](double lam) {
    const int n_steps = 4000;
    double s = 1e-7;
    double v = 1.0 - lam * s * s / 4.0;
    double w = -lam * s / 2.0;
    const double ds = (1.0 - s) / n_steps;
    auto f = [lam](double si, double vi, double wi, double& dv, double& dw) {
      dv = wi;
      dw = -wi / si - lam * vi;
    };
    for (int i = 0; i < n_steps; ++i) {
      double k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
      f(s, v, w, k1v, k1w);
      f(s + 0.5 * ds, v + 0.5 * ds * k1v, w + 0.5 * ds * k1w, k2v, k2w);
      f(s + 0.5 * ds, v + 0.5 * ds * k2v, w + 0.5 * ds * k2w, k3v, k3w);
      f(s + ds, v + ds * k3v, w + ds * k3w, k4v, k4w);
      v += ds / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      w += ds / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      s += ds;
    }
    return w + sigma * v;
  };

  double lo = 1e-4, hi = 0.0;
  double g_lo = defect(lo);
  for (double lam = 0.25; lam < 40.0; lam += 0.25) {
    const double g = defect(lam);
    if (g_lo * g <= 0.0) {
      hi = lam;
      break;
    }
    lo = lam;
    g_lo = g;
  }
  if (hi == 0.0)
    throw numerical_error("first_robin_disk_eigenvalue: no sign change found");
  for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g_lo * defect(mid) <= 0.0)
      hi = mid;
    else {
      lo = mid;
      g_lo = defect(mid);
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, Vec> eval_solution(const Solution& sol, const Vec& x) {
  if (sol.problem && !sol.problem->domain.contains(x, 1e-9))
    throw validation_error("eval_solution: point outside the solution domain");
  return {sol.f.value(x), sol.f.grad(x)};
}

namespace {

struct TestFn {
  ScalarField v;
  VectorField dv;
};

// Test functions ((r^2-|x|^2)/r^2)^2 x1^a x2^b: polynomial (so the product
// rules integrate them exactly), vanishing to second order on the spherical
// boundary but not on Gamma_r.
std::vector<TestFn> test_family(double r) {
  std::vector<std::array<int, 2>> powers = {{0, 0}, {1, 0}, {0, 1}, {2, 0},
                                            {1, 1}, {0, 2}, {3, 0}, {2, 1},
                                            {1, 2}, {0, 3}};
  std::vector<TestFn> fam;
  const double r2 = r * r;
  for (auto [a, b] : powers) {
    TestFn t;
    t.v = [a = a, b = b, r2](const Vec& x) {
      const double w = (r2 - x.squaredNorm()) / r2;
      return w * w * std::pow(x[0], a) * std::pow(x[1], b);
    };
    t.dv = [a = a, b = b, r2](const Vec& x) {
      const double w = (r2 - x.squaredNorm()) / r2;
      const double q = std::pow(x[0], a) * std::pow(x[1], b);
      Vec g = (-4.0 * w * q / r2) * x;
      g[0] += w * w * (a == 0 ? 0.0 : a * std::pow(x[0], a - 1) * std::pow(x[1], b));
      g[1] += w * w * (b == 0 ? 0.0 : b * std::pow(x[0], a) * std::pow(x[1], b - 1));
      return g;
    };
    fam.push_back(std::move(t));
  }
  return fam;
}

}  // namespace

namespace {

// Degree-4 Dunavant rule on the reference triangle (6 points).
struct TriQuadPoint {
  double l0, l1, l2, w;
};
const TriQuadPoint kTriRule[6] = {
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322}};

// Applies f(x, w) over every element quadrature point of the mesh.
void for_each_element_point(
    const Mesh& mesh, const std::function<void(const Vec&, double)>& f) {
  for (const auto& t : mesh.tris) {
    const auto &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]], &c = mesh.nodes[t[2]];
    const double area = 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) -
                                       (c.x() - a.x()) * (b.y() - a.y()));
    for (const TriQuadPoint& q : kTriRule) {
      const Eigen::Vector2d p = q.l0 * a + q.l1 * b + q.l2 * c;
      f(vec2(p.x(), p.y()), q.w * area);
    }
  }
}

double meshwise_residual(const Solution& sol, const CoefficientSet& cs,
                         double r) {
  const Mesh& mesh = *sol.mesh;
  double worst = 0.0;
  for (const TestFn& t : test_family(r)) {
    StableSum num, nrm;
    for_each_element_point(mesh, [&](const Vec& x, double w) {
      const Vec du = sol.f.grad(x);
      const Vec dv = t.dv(x);
      const double vv = t.v(x);
      const double uu = sol.f.value(x);
      num.add(w * ((cs.A(x) * du).dot(dv) + (cs.V ? cs.V(x) : 0.0) * uu * vv));
      nrm.add(w * (vv * vv + dv.squaredNorm()));
    });
    const double gp = 0.5 / std::sqrt(3.0);
    for (const auto& e : mesh.flat_edges) {
      const auto &p = mesh.nodes[e[0]], &q = mesh.nodes[e[1]];
      const double len = (q - p).norm();
      for (double s : {0.5 - gp, 0.5 + gp}) {
        const Vec xg = vec2((1.0 - s) * p.x() + s * q.x(), 0.0);
        num.add(-0.5 * len * (cs.eta ? cs.eta(xg) : 0.0) * sol.f.value(xg) *
                t.v(xg));
      }
    }
    const double denom = std::sqrt(std::max(nrm.get(), 1e-300));
    worst = std::max(worst, std::abs(num.get()) / denom);
  }
  return worst;
}

}  // namespace

double weak_form_residual(const Solution& sol, const CoefficientSet& cs,
                          double r, const QuadratureSpec& spec) {
  if (sol.mesh && r >= 0.999 * sol.mesh->radius)
    return meshwise_residual(sol, cs, sol.mesh->radius);

  const QuadratureRule vol = QuadratureRule::halfball(2, r, 0.0, spec);
  const QuadratureRule bdy = QuadratureRule::boundary(2, r, 0.0, spec);
  double worst = 0.0;
  for (const TestFn& t : test_family(r)) {
    StableSum num, nrm;
    for (size_t i = 0; i < vol.points.size(); ++i) {
      const Vec& x = vol.points[i];
      const double w = vol.weights[i];
      const Vec du = sol.f.grad(x);
      const Vec dv = t.dv(x);
      const double vv = t.v(x);
      const double uu = sol.f.value(x);
      num.add(w * ((cs.A(x) * du).dot(dv) + (cs.V ? cs.V(x) : 0.0) * uu * vv));
      nrm.add(w * (vv * vv + dv.squaredNorm()));
    }
    for (size_t i = 0; i < bdy.points.size(); ++i) {
      const Vec& x = bdy.points[i];
      num.add(-bdy.weights[i] * (cs.eta ? cs.eta(x) : 0.0) * sol.f.value(x) *
              t.v(x));
    }
    const double denom = std::sqrt(std::max(nrm.get(), 1e-300));
    worst = std::max(worst, std::abs(num.get()) / denom);
  }
  return worst;
}

double l2_error(const Solution& sol, const ScalarField& reference, double r,
                const QuadratureSpec& spec) {
  if (sol.mesh && r >= 0.999 * sol.mesh->radius) {
    StableSum acc;
    for_each_element_point(*sol.mesh, [&](const Vec& x, double w) {
      const double d = sol.f.value(x) - reference(x);
      acc.add(w * d * d);
    });
    return std::sqrt(std::max(0.0, acc.get()));
  }
  const IntegralResult res = weighted_halfball_integral(
      [&](const Vec& x) {
        const double d = sol.f.value(x) - reference(x);
        return d * d;
      },
      2, r, 0.0, spec);
  return std::sqrt(std::max(0.0, res.value));
}

}  // namespace ucw
