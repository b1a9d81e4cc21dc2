#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ucw/quadrature.hpp"
#include "ucw/stable_sum.hpp"

using namespace ucw;

namespace {
const ScalarField one = [](const Vec&) { return 1.0; };
}

TEST_CASE("half-ball rule integrates the constant against the weight") {
  // int_{B_r^+} (r^2-|x|^2)^p dx = pi r^(2p+2) / (2(p+1)) in d = 2
  for (double r : {0.5, 1.0, 2.0}) {
    for (double p : {0.0, 1.0, 2.5}) {
      const double exact = oracle::halfdisk_monomial(0, 0, p, r);
      const auto res = weighted_halfball_integral(one, 2, r, p);
      CHECK(res.value == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  // d = 2, r = 1, p = 1 anchor
  CHECK(weighted_halfball_integral(one, 2, 1.0, 1.0).value ==
        doctest::Approx(oracle::kPi / 4.0).epsilon(1e-13));
}

TEST_CASE("zero integrand gives exactly zero") {
  const ScalarField zero = [](const Vec&) { return 0.0; };
  CHECK(weighted_halfball_integral(zero, 2, 1.0, 1.0).value == 0.0);
  CHECK(weighted_boundary_integral(zero, 2, 1.0, 2.0).value == 0.0);
}

TEST_CASE("(x1^2-x2^2)^2 against weight p=1 equals pi/48") {
  const ScalarField f = [](const Vec& x) {
    const double q = x[0] * x[0] - x[1] * x[1];
    return q * q;
  };
  const auto res = weighted_halfball_integral(f, 2, 1.0, 1.0);
  CHECK(res.value == doctest::Approx(oracle::kPi / 48.0).epsilon(1e-12));
}

TEST_CASE("boundary rule closed forms") {
  CHECK(weighted_boundary_integral(one, 2, 1.0, 2.0).value ==
        doctest::Approx(16.0 / 15.0).epsilon(1e-13));
  for (int k : {1, 2, 3}) {
    const ScalarField g = [k](const Vec& x) {
      return std::pow(x[0], 2 * k);
    };
    CHECK(weighted_boundary_integral(g, 2, 1.0, 0.0).value ==
          doctest::Approx(2.0 / (2 * k + 1)).epsilon(1e-12));
  }
}

TEST_CASE("polynomial exactness against symbolic values") {
  // Monomials x1^a x2^b against (r^2-|x|^2)^p, integer p: the rule must hit
  // the Beta closed forms to 1e-12 relative.
  std::mt19937 rng(20260809);
  for (int rep = 0; rep < 40; ++rep) {
    const int a = std::uniform_int_distribution<int>(0, 6)(rng);
    const int b = std::uniform_int_distribution<int>(0, 6)(rng);
    const int p = std::uniform_int_distribution<int>(0, 3)(rng);
    const double r = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
    const ScalarField f = [a, b](const Vec& x) {
      return std::pow(x[0], a) * std::pow(x[1], b);
    };
    const double exact = oracle::halfdisk_monomial(a, b, p, r);
    const double got = weighted_halfball_integral(f, 2, r, p).value;
    const double scale = oracle::halfdisk_monomial(a - a % 2, b, p, r) + 1e-30;
    CHECK(std::abs(got - exact) / scale < 1e-12);
  }
  for (int a : {0, 2, 5, 8}) {
    for (int p : {0, 1, 3}) {
      const ScalarField g = [a](const Vec& x) { return std::pow(x[0], a); };
      const double exact = oracle::segment_monomial(a, p, 1.3);
      const double got = weighted_boundary_integral(g, 2, 1.3, p).value;
      const double scale = oracle::segment_monomial(a - a % 2, p, 1.3);
      CHECK(std::abs(got - exact) / scale < 1e-12);
    }
  }
}

TEST_CASE("all rule weights are positive") {
  for (double p : {0.0, 1.0, 3.5}) {
    const auto rule = QuadratureRule::halfball(2, 0.8, p, {32, 48});
    for (double w : rule.weights) CHECK(w > 0.0);
    const auto bdy = QuadratureRule::boundary(2, 0.8, p, {32, 48});
    for (double w : bdy.weights) CHECK(w > 0.0);
  }
}

TEST_CASE("monotone refinement: doubling nodes stays within the estimate") {
  const ScalarField f = [](const Vec& x) {
    return std::exp(x[0]) * std::cos(2.0 * x[1]) + x[1] * x[1] * x[0];
  };
  for (const QuadratureSpec spec : {QuadratureSpec{16, 32}, QuadratureSpec{24, 48}}) {
    const QuadratureSpec doubled{2 * spec.n_rad, 2 * spec.n_ang};
    const auto base = weighted_halfball_integral(f, 2, 1.0, 1.0, spec);
    const auto fine = weighted_halfball_integral(f, 2, 1.0, 1.0, doubled);
    CHECK(std::abs(fine.value - base.value) <= base.error_estimate);
  }
}

TEST_CASE("non-finite integrand sample is reported") {
  const ScalarField bad = [](const Vec& x) { return 1.0 / (x[1] - x[1]); };
  CHECK_THROWS_AS(weighted_halfball_integral(bad, 2, 1.0, 1.0),
                  numerical_error);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(weighted_halfball_integral(one, 2, -1.0, 1.0),
                  validation_error);
  CHECK_THROWS_AS(weighted_halfball_integral(one, 2, 1.0, -1.5),
                  validation_error);
  CHECK_THROWS_AS(weighted_boundary_integral(one, 2, 1.0, -0.5),
                  validation_error);
  CHECK_THROWS_AS(weighted_halfball_integral(one, 5, 1.0, 1.0),
                  validation_error);
}

TEST_CASE("results are bitwise deterministic across repeated evaluation") {
  const ScalarField f = [](const Vec& x) {
    return std::sin(3.0 * x[0]) * std::exp(x[1]);
  };
  const double v1 = weighted_halfball_integral(f, 2, 0.9, 2.0).value;
  const double v2 = weighted_halfball_integral(f, 2, 0.9, 2.0).value;
  CHECK(v1 == v2);
}

TEST_CASE("d=3 half-ball smoke test against the closed form") {
  // int_{B_1^+} (1-|x|^2)^p dx = 2 pi * (1/2) B(3/2, p+1) in d = 3
  for (double p : {0.0, 1.0}) {
    const double exact = oracle::kPi * oracle::beta_fn(1.5, p + 1.0);
    const auto res = weighted_halfball_integral(one, 3, 1.0, p, {32, 24});
    CHECK(res.value == doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("compensated summation recovers cancellation-prone sums") {
  StableSum acc;
  acc.add(1.0);
  for (int i = 0; i < 1000; ++i) acc.add(1e-17);
  acc.add(-1.0);
  CHECK(acc.get() == doctest::Approx(1e-14).epsilon(1e-10));
}
