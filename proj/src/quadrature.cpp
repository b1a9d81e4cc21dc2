#include "ucw/quadrature.hpp"

#include <cmath>

#include "ucw/stable_sum.hpp"

namespace ucw {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_common(int dim, double r, int n_rad, int n_ang) {
  if (dim != 2 && dim != 3)
    throw validation_error("quadrature: only d=2 and d=3 are built");
  if (!(r > 0.0)) throw validation_error("quadrature: radius must be > 0");
  if (n_rad < 1 || n_ang < 1)
    throw validation_error("quadrature: node counts must be >= 1");
}

}  // namespace

QuadratureRule QuadratureRule::halfball(int dim, double r, double p,
                                        const QuadratureSpec& spec) {
  check_common(dim, r, spec.n_rad, spec.n_ang);
  if (!(p > -1.0))
    throw validation_error("halfball rule: weight power must exceed -1");

  QuadratureRule rule;
  rule.dim = dim;
  rule.radius = r;
  rule.power = p;

  // s = r(x+1)/2 maps [-1,1] -> [0,r];
  // (r^2-s^2)^p s^(d-1) ds = (r/2)^(p+1) (1-x)^p * (r+s)^p s^(d-1) dx.
  const Rule1d rad = gauss_jacobi(spec.n_rad, p, 0.0);
  const double rad_scale = std::pow(0.5 * r, p + 1.0);
  std::vector<double> s(rad.size()), ws(rad.size());
  for (int i = 0; i < rad.size(); ++i) {
    s[i] = 0.5 * r * (rad.nodes[i] + 1.0);
    ws[i] = rad_scale * rad.weights[i] * std::pow(r + s[i], p) *
            std::pow(s[i], dim - 1);
  }

  if (dim == 2) {
    const Rule1d ang = gauss_legendre(spec.n_ang);
    rule.points.reserve(static_cast<size_t>(rad.size()) * ang.size());
    rule.weights.reserve(rule.points.capacity());
    for (int j = 0; j < ang.size(); ++j) {
      const double theta = 0.5 * kPi * (ang.nodes[j] + 1.0);
      const double wj = 0.5 * kPi * ang.weights[j];
      const double c = std::cos(theta), sn = std::sin(theta);
      for (int i = 0; i < rad.size(); ++i) {
        rule.points.push_back(vec2(s[i] * c, s[i] * sn));
        rule.weights.push_back(ws[i] * wj);
      }
    }
  } else {
    // Half-sphere {x3 > 0}: x = s (sin(phi)cos(psi), sin(phi)sin(psi),
    // cos(phi)), dsigma = dt dpsi with t = cos(phi) in (0,1]. The azimuth
    // integrand is a full-period trig polynomial, where the equal-weight
    // rule is exact.
    const Rule1d pol = gauss_legendre(spec.n_ang);
    const int n_az = 2 * spec.n_ang;
    const double waz = 2.0 * kPi / n_az;
    for (int j = 0; j < pol.size(); ++j) {
      const double t = 0.5 * (pol.nodes[j] + 1.0);
      const double wt = 0.5 * pol.weights[j];
      const double sp = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int k = 0; k < n_az; ++k) {
        const double psi = waz * k;
        for (int i = 0; i < static_cast<int>(s.size()); ++i) {
          Vec x(3);
          x << s[i] * sp * std::cos(psi), s[i] * sp * std::sin(psi),
              s[i] * t;
          rule.points.push_back(x);
          rule.weights.push_back(ws[i] * wt * waz);
        }
      }
    }
  }
  return rule;
}

QuadratureRule QuadratureRule::boundary(int dim, double r, double p,
                                        const QuadratureSpec& spec) {
  check_common(dim, r, spec.n_rad, spec.n_ang);
  if (!(p >= 0.0))
    throw validation_error("boundary rule: weight power must be >= 0");

  QuadratureRule rule;
  rule.dim = dim;
  rule.radius = r;
  rule.power = p;

  if (dim == 2) {
    // Gamma_r = [-r, r] on the x1-axis; weight (r^2-t^2)^p is the Jacobi
    // (p, p) weight after t = r x.
    const int n = std::max(spec.n_rad, spec.n_ang / 2);
    const Rule1d gj = gauss_jacobi(n, p, p);
    const double scale = std::pow(r, 2.0 * p + 1.0);
    for (int i = 0; i < gj.size(); ++i) {
      rule.points.push_back(vec2(r * gj.nodes[i], 0.0));
      rule.weights.push_back(scale * gj.weights[i]);
    }
  } else {
    // Disk {|y'| <= r} in the plane {x3 = 0}: radial Jacobi times periodic
    // azimuth.
    const Rule1d rad = gauss_jacobi(spec.n_rad, p, 0.0);
    const double rad_scale = std::pow(0.5 * r, p + 1.0);
    const int n_az = 2 * spec.n_ang;
    const double waz = 2.0 * kPi / n_az;
    for (int k = 0; k < n_az; ++k) {
      const double psi = waz * k;
      for (int i = 0; i < rad.size(); ++i) {
        const double s = 0.5 * r * (rad.nodes[i] + 1.0);
        Vec x(3);
        x << s * std::cos(psi), s * std::sin(psi), 0.0;
        rule.points.push_back(x);
        rule.weights.push_back(rad_scale * rad.weights[i] *
                               std::pow(r + s, p) * s * waz);
      }
    }
  }
  return rule;
}

double QuadratureRule::integrate(const ScalarField& f) const {
  StableSum acc;
  for (size_t i = 0; i < points.size(); ++i) {
    const double fx = f(points[i]);
    if (!std::isfinite(fx))
      throw numerical_error("quadrature: non-finite integrand sample");
    acc.add(weights[i] * fx);
  }
  return acc.get();
}

namespace {

double magnitude_scale(const QuadratureRule& rule, const ScalarField& f) {
  StableSum acc;
  for (size_t i = 0; i < rule.points.size(); ++i)
    acc.add(std::abs(rule.weights[i] * f(rule.points[i])));
  return acc.get();
}

IntegralResult paired_estimate(const QuadratureRule& fine,
                               const QuadratureRule& coarse,
                               const ScalarField& f) {
  IntegralResult out;
  out.value = fine.integrate(f);
  const double coarse_value = coarse.integrate(f);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       magnitude_scale(fine, f);
  out.error_estimate = std::abs(out.value - coarse_value) + floor;
  return out;
}

}  // namespace

IntegralResult weighted_halfball_integral(const ScalarField& f, int dim,
                                          double r, double p,
                                          const QuadratureSpec& spec) {
  QuadratureSpec half{std::max(1, spec.n_rad / 2), std::max(1, spec.n_ang / 2)};
  return paired_estimate(QuadratureRule::halfball(dim, r, p, spec),
                         QuadratureRule::halfball(dim, r, p, half), f);
}

IntegralResult weighted_boundary_integral(const ScalarField& g, int dim,
                                          double r, double p,
                                          const QuadratureSpec& spec) {
  QuadratureSpec half{std::max(1, spec.n_rad / 2), std::max(1, spec.n_ang / 2)};
  return paired_estimate(QuadratureRule::boundary(dim, r, p, spec),
                         QuadratureRule::boundary(dim, r, p, half), g);
}

}  // namespace ucw
