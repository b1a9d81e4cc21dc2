#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ucw/coefficients.hpp"
#include "ucw/frequency.hpp"
#include "ucw/solutions.hpp"

using namespace ucw;

TEST_CASE("identity builtin evaluates to I with zero derivative") {
  const CoefficientSet cs = builtin_coefficients("identity");
  const auto ce = eval(cs, vec2(0.3, 0.4));
  CHECK((ce.A - Mat::Identity(2, 2)).norm() == 0.0);
  for (const Mat& D : ce.DA) CHECK(D.norm() == 0.0);
  CHECK(ce.V == 0.0);
}

TEST_CASE("hand-differentiated perturbation matches eval") {
  // A = I + 0.1 sin(x1) E11 (the lipschitz-perturb family at L = 0.1 has
  // exactly this (1,1) entry); at x = 0 the derivative is (0.1, 0).
  const CoefficientSet cs = builtin_coefficients("lipschitz-perturb", {{"L", 0.1}});
  const auto ce = eval(cs, vec2(0.0, 0.0));
  CHECK(ce.DA[0](0, 0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(ce.DA[1](0, 0) == 0.0);
}

TEST_CASE("analytic DA matches the finite-difference Jacobian oracle") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> angle(0.05, oracle::kPi - 0.05);
  std::uniform_real_distribution<double> rad(0.05, 1.8);
  for (const char* name : {"block", "lipschitz-perturb"}) {
    const CoefficientSet cs = builtin_coefficients(name, {{"c", 0.2}, {"L", 0.2}});
    for (int rep = 0; rep < 20; ++rep) {
      const double s = rad(rng), th = angle(rng);
      const Vec x = vec2(s * std::cos(th), s * std::sin(th));
      const auto ce = eval(cs, x);
      const double h = 1e-5;
      for (int k = 0; k < 2; ++k) {
        Vec xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const Mat fd = (cs.A(xp) - cs.A(xm)) / (2.0 * h);
        CHECK((ce.DA[k] - fd).cwiseAbs().maxCoeff() < 1e-6);
      }
    }
  }
}

TEST_CASE("eval rejects points outside the closed domain") {
  const CoefficientSet cs = builtin_coefficients("identity", {{"radius", 1.0}});
  CHECK_THROWS_AS(eval(cs, vec2(2.0, 0.0)), validation_error);
  CHECK_THROWS_AS(eval(cs, vec2(0.1, -0.2)), validation_error);
  CHECK_THROWS_AS(eval_eta(cs, vec2(0.1, 0.5)), validation_error);
}

TEST_CASE("estimate_bounds on the identity field") {
  const auto be = estimate_bounds(builtin_coefficients("identity"));
  CHECK(be.lambda_hat == doctest::Approx(1.0));
  CHECK(be.M_hat == 0.0);
  CHECK(be.M_eta_hat == 0.0);
  for (auto& [r, e] : be.eps_hat) CHECK(e == 0.0);
  CHECK(be.I_eps_hat == 0.0);
}

TEST_CASE("estimate_bounds recovers the Lipschitz modulus of I + L x1 E11") {
  // For A with |DA| <= L everywhere, eps_hat(r) <= L r and I_eps ~ L.
  const double L = 0.05;
  CoefficientSet cs = builtin_coefficients("identity");
  cs.A = [L](const Vec& x) {
    Mat A = Mat::Identity(2, 2);
    A(0, 0) += L * x[0];
    return A;
  };
  cs.DA = [L](const Vec&) {
    std::vector<Mat> D(2, Mat::Zero(2, 2));
    D[0](0, 0) = L;
    return D;
  };
  const auto be = estimate_bounds(cs);
  for (auto& [r, e] : be.eps_hat) {
    CHECK(e <= L * r * (1.0 + 1e-9));
    CHECK(e >= 0.4 * L * r);  // sup over the annulus reaches |x| ~ r
  }
  CHECK(be.I_eps_hat == doctest::Approx(L).epsilon(0.2));
}

TEST_CASE("estimate_bounds eigenvalue bracket for diag(2, 1/2)") {
  const CoefficientSet cs = builtin_coefficients(
      "constant", {{"a11", 2.0}, {"a22", 0.5}});
  const auto be = estimate_bounds(cs);
  CHECK(be.lambda_hat == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("estimate_bounds is exactly monotone under V scaling") {
  Solution base = analytic_solution("robin-tilted", {{"m", 1.0}, {"c", 0.5}});
  CoefficientSet cs = *base.problem;
  const double m1 = estimate_bounds(cs).M_hat;
  ScalarField v = cs.V;
  VectorField dv = cs.DV;
  cs.V = [v](const Vec& x) { return 2.0 * v(x); };
  cs.DV = [dv](const Vec& x) { return Vec(2.0 * dv(x)); };
  const double m2 = estimate_bounds(cs).M_hat;
  CHECK(m2 == 2.0 * m1);
}

TEST_CASE("indefinite sample raises an ellipticity violation") {
  CoefficientSet cs = builtin_coefficients("identity");
  cs.A = [](const Vec& x) {
    Mat A = Mat::Identity(2, 2);
    A(0, 0) = x.norm() > 0.5 ? -1.0 : 1.0;
    return A;
  };
  cs.DA = nullptr;
  CHECK_THROWS_AS(estimate_bounds(cs), numerical_error);
}

TEST_CASE("manufactured coefficients from exponential solutions") {
  const double eta0 = 1.5;
  SmoothFunction u;
  u.value = [eta0](const Vec& x) { return std::exp(eta0 * x[1]); };
  u.grad = [eta0](const Vec& x) {
    return Vec(vec2(0.0, eta0 * std::exp(eta0 * x[1])));
  };
  u.hess = [eta0](const Vec& x) {
    Mat H = Mat::Zero(2, 2);
    H(1, 1) = eta0 * eta0 * std::exp(eta0 * x[1]);
    return H;
  };
  const CoefficientSet cs =
      manufacture_from_solution(u, {}, {}, HalfBallDomain{2, 1.5});
  CHECK(cs.V(vec2(0.2, 0.3)) == doctest::Approx(eta0 * eta0).epsilon(1e-10));
  CHECK(cs.eta(vec2(0.4, 0.0)) == doctest::Approx(-eta0).epsilon(1e-10));
}

TEST_CASE("manufactured u == 1 gives the trivial problem") {
  SmoothFunction u;
  u.value = [](const Vec&) { return 1.0; };
  u.grad = [](const Vec&) { return Vec(Vec::Zero(2)); };
  u.hess = [](const Vec&) { return Mat(Mat::Zero(2, 2)); };
  const CoefficientSet cs =
      manufacture_from_solution(u, {}, {}, HalfBallDomain{2, 2.0});
  CHECK(cs.V(vec2(0.3, 0.2)) == 0.0);
  CHECK(cs.eta(vec2(0.3, 0.0)) == 0.0);
}

TEST_CASE("manufacture refuses sign-changing solutions") {
  SmoothFunction u;
  u.value = [](const Vec& x) { return x[0]; };
  u.grad = [](const Vec&) { return Vec(vec2(1.0, 0.0)); };
  CHECK_THROWS_AS(manufacture_from_solution(u, {}, {}, HalfBallDomain{2, 1.0}),
                  numerical_error);
}

TEST_CASE("manufacture round-trip: weak residual small on analytic solutions") {
  // cos(k x1) e^(k x2) and the tilted exponential, rebuilt through the
  // manufactured route, must satisfy the weak form to quadrature tolerance.
  for (auto [name, params] :
       std::vector<std::pair<std::string, std::map<std::string, double>>>{
           {"robin-exponential", {{"eta0", 2.0}}},
           {"robin-tilted", {{"m", 1.0}, {"c", 0.4}}},
           {"one", {}}}) {
    const Solution sol = analytic_solution(name, params);
    const CoefficientSet cs =
        manufacture_from_solution(sol.f, {}, {}, sol.problem->domain);
    Solution copy = sol;
    const double res = weak_form_residual(copy, cs, 1.0, QuadratureSpec{48, 96});
    CHECK(res < 1e-9);
  }
}

TEST_CASE("builtin block field satisfies the flat-boundary flux condition") {
  const CoefficientSet cs = builtin_coefficients("block", {{"c", 0.3}});
  for (double t : {-1.5, -0.4, 0.2, 0.9, 1.7}) {
    const Vec xb = vec2(t, 0.0);
    const Mat A = cs.A(xb);
    // <A(x) x, n> with n = -e_2 reduces to a_{21} x_1 on the boundary
    CHECK(std::abs(A(1, 0) * t) < 1e-14);
  }
}

TEST_CASE("builtins with A(0)=I have conformal factor 1 at the origin") {
  for (const char* name : {"identity", "block", "lipschitz-perturb"}) {
    const CoefficientSet cs = builtin_coefficients(name, {{"c", 0.25}, {"L", 0.25}});
    const Vec x = vec2(1e-8, 0.7e-8);
    CHECK(conformal_mu(cs.A, x) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("lipschitz-perturb modulus is certified by sampling") {
  const double L = 0.1;
  const CoefficientSet cs = builtin_coefficients("lipschitz-perturb", {{"L", L}});
  const auto be = estimate_bounds(cs);
  for (auto& [r, e] : be.eps_hat) CHECK(e <= L * r * (1.0 + 1e-9));
}

TEST_CASE("unknown builtin name is rejected") {
  CHECK_THROWS_AS(builtin_coefficients("zebra"), validation_error);
  CHECK_THROWS_AS(builtin_coefficients("block", {{"c", 2.0}}), validation_error);
}
