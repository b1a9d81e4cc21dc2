#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ucw/solutions.hpp"

using namespace ucw;

TEST_CASE("homogeneous entry values and gradients") {
  const Solution sol = analytic_solution("homogeneous", {{"k", 2}});
  CHECK(sol.u(vec2(1.0, 0.0)) == 1.0);  // Re z^2 = x1^2 - x2^2
  CHECK(sol.du(vec2(1.0, 0.0))[0] == 2.0);
  CHECK(sol.du(vec2(1.0, 0.0))[1] == 0.0);

  const Solution k1 = analytic_solution("homogeneous", {{"k", 1}});
  auto [u, du] = eval_solution(k1, vec2(0.0, 1.0));
  CHECK(u == 0.0);
  CHECK(du[0] == 1.0);
  CHECK(du[1] == 0.0);
}

TEST_CASE("robin-exponential at eta0 = 0 is the constant solution") {
  const Solution sol = analytic_solution("robin-exponential", {{"eta0", 0.0}});
  CHECK(sol.u(vec2(0.3, 0.7)) == 1.0);
  CHECK(sol.problem->V(vec2(0.3, 0.7)) == 0.0);
  CHECK(sol.problem->eta(vec2(0.3, 0.0)) == 0.0);
}

TEST_CASE("analytic entries satisfy PDE and Robin condition at random samples") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> rad(0.01, 1.9);
  std::uniform_real_distribution<double> ang(0.0, oracle::kPi);
  for (auto [name, params] :
       std::vector<std::pair<std::string, std::map<std::string, double>>>{
           {"homogeneous", {{"k", 3}}},
           {"robin-cosexp", {{"k", 2}}},
           {"robin-cosexp-decay", {{"k", 1}}},
           {"robin-exponential", {{"eta0", 4.0}}},
           {"robin-tilted", {{"m", 1.0}, {"c", 0.5}}},
           {"robin-eigen", {{"sigma", 1.0}}}}) {
    const Solution sol = analytic_solution(name, params);
    CHECK(sol.residual_estimate < 1e-10);
    const CoefficientSet& cs = *sol.problem;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double s = rad(rng), th = ang(rng);
      const Vec x = vec2(s * std::cos(th), s * std::sin(th));
      const Mat H = sol.f.hess(x);
      worst = std::max(worst, std::abs(H.trace() - cs.V(x) * sol.u(x)));
    }
    CHECK(worst < 1e-10);
    for (int i = 0; i < 100; ++i) {
      const Vec xb = vec2(rad(rng) - 1.0, 0.0);
      const double robin = -sol.du(xb)[1] - cs.eta(xb) * sol.u(xb);
      CHECK(std::abs(robin) < 1e-10);
    }
  }
}

TEST_CASE("analytic gradients agree with difference quotients of u") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-0.9, 0.9);
  for (const char* name : {"homogeneous", "robin-cosexp", "robin-tilted"}) {
    const Solution sol = analytic_solution(name, {{"k", 2}, {"m", 1.0}, {"c", 0.3}});
    for (int rep = 0; rep < 50; ++rep) {
      const Vec x = vec2(coord(rng), std::abs(coord(rng)) + 0.05);
      const Vec g = sol.du(x);
      for (int k = 0; k < 2; ++k) {
        const double fd = oracle::fd_derivative(
            [&](double t) {
              Vec y = x;
              y[k] = t;
              return sol.u(y);
            },
            x[k], 1e-4);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("radial shooting oracle pins the first Robin disk eigenvalue") {
  const double lam = first_robin_disk_eigenvalue(1.0);
  const double sq = std::sqrt(lam);
  // Robin defect of the Bessel closed form at the shooting result
  const double defect = -sq * std::cyl_bessel_j(1, sq) + std::cyl_bessel_j(0, sq);
  CHECK(std::abs(defect) < 1e-8);
  const Solution sol = analytic_solution("robin-eigen", {{"sigma", 1.0}});
  CHECK(sol.residual_estimate < 1e-8);
}

TEST_CASE("half-disk meshes are conforming with bounded minimum angle") {
  for (int n : {4, 8, 16}) {
    const Mesh mesh = Mesh::half_disk(1.0, n);
    CHECK(mesh.min_angle_deg() > 20.0);
    CHECK(mesh.flat_edges.size() == size_t(2 * n));
    CHECK(!mesh.arc_nodes.empty());
    double area = 0.0;
    for (const auto& t : mesh.tris) {
      const auto &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]], &c = mesh.nodes[t[2]];
      area += 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) -
                             (c.x() - a.x()) * (b.y() - a.y()));
    }
    // polygonal area approaches pi/2 from below
    CHECK(area < oracle::kPi / 2.0);
    CHECK(area > oracle::kPi / 2.0 - 2.5 / (n * n));
  }
}

TEST_CASE("mesh round-trips through the plain-text format") {
  const Mesh mesh = Mesh::half_disk(1.5, 6);
  std::stringstream ss;
  mesh.write(ss);
  const Mesh back = Mesh::read(ss);
  REQUIRE(back.nodes.size() == mesh.nodes.size());
  REQUIRE(back.tris.size() == mesh.tris.size());
  CHECK(back.flat_edges.size() == mesh.flat_edges.size());
  CHECK(back.arc_nodes.size() == mesh.arc_nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i)
    CHECK((back.nodes[i] - mesh.nodes[i]).norm() == 0.0);
}

namespace {

double fem_l2_error(const std::string& truth_name,
                    const std::map<std::string, double>& params, int n_rings) {
  const Solution truth = analytic_solution(truth_name, params);
  auto cs = std::make_shared<CoefficientSet>(*truth.problem);
  cs->domain.r_max = 1.0;
  const Mesh mesh = Mesh::half_disk(1.0, n_rings);
  const Solution fem = solve_robin_fem(cs, mesh, truth.f.value);
  return l2_error(fem, truth.f.value, 0.999, QuadratureSpec{48, 96});
}

}  // namespace

TEST_CASE("FEM converges at second order on manufactured Robin problems") {
  for (auto [name, params] :
       std::vector<std::pair<std::string, std::map<std::string, double>>>{
           {"robin-cosexp", {{"k", 1.0}}},        // eta = -1
           {"robin-cosexp-decay", {{"k", 2.0}}}}) // eta = +2
  {
    const double e1 = fem_l2_error(name, params, 12);
    const double e2 = fem_l2_error(name, params, 24);
    const double ratio = e1 / e2;
    CHECK(ratio > 3.6);
    CHECK(ratio < 4.4);
  }
}

TEST_CASE("FEM with zero data is identically zero") {
  auto cs = std::make_shared<CoefficientSet>(
      builtin_coefficients("identity", {{"radius", 1.0}}));
  const Mesh mesh = Mesh::half_disk(1.0, 6);
  const Solution fem =
      solve_robin_fem(cs, mesh, [](const Vec&) { return 0.0; });
  CHECK(std::abs(fem.u(vec2(0.2, 0.3))) < 1e-13);
}

TEST_CASE("FEM reproduces nodal values exactly and interpolates mid-element") {
  const Solution truth = analytic_solution("robin-cosexp", {{"k", 1.0}});
  auto cs = std::make_shared<CoefficientSet>(*truth.problem);
  cs->domain.r_max = 1.0;
  const Mesh mesh = Mesh::half_disk(1.0, 12);
  const Solution fem = solve_robin_fem(cs, mesh, truth.f.value);
  // at an arc node the Dirichlet data is reproduced exactly
  const int node = mesh.arc_nodes[mesh.arc_nodes.size() / 3];
  const Vec xn = vec2(mesh.nodes[node].x(), mesh.nodes[node].y());
  CHECK(fem.u(xn) == doctest::Approx(truth.u(xn)).epsilon(1e-14));
  // mid-element values stay within interpolation error of the truth
  const Vec xq = vec2(0.21, 0.33);
  CHECK(std::abs(fem.u(xq) - truth.u(xq)) < 0.5 * mesh.h * mesh.h *
                                                (1.0 + std::abs(truth.u(xq))));
}

TEST_CASE("FEM weak-form residual is attached and small") {
  const Solution truth = analytic_solution("robin-cosexp", {{"k", 1.0}});
  auto cs = std::make_shared<CoefficientSet>(*truth.problem);
  cs->domain.r_max = 1.0;
  const Solution fem = solve_robin_fem(cs, Mesh::half_disk(1.0, 16), truth.f.value);
  CHECK(fem.residual_estimate < 2e-3);
  CHECK(fem.provenance == Provenance::fem);
}

TEST_CASE("unknown analytic name is rejected") {
  CHECK_THROWS_AS(analytic_solution("nope"), validation_error);
  CHECK_THROWS_AS(analytic_solution("homogeneous", {{"k", -1.0}}),
                  validation_error);
}
