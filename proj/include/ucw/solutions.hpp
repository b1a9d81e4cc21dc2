#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include "ucw/coefficients.hpp"
#include "ucw/quadrature.hpp"
#include "ucw/types.hpp"

namespace ucw {

enum class Provenance { analytic, fem };

/// A scalar field u with gradient access, its provenance, and the Robin
/// problem it solves.
struct Mesh;

struct Solution {
  std::string name = "unnamed";
  SmoothFunction f;  // u, Du, (optionally) D^2 u
  Provenance provenance = Provenance::analytic;
  double mesh_h = 0.0;
  std::shared_ptr<const CoefficientSet> problem;
  double residual_estimate = 0.0;
  std::shared_ptr<const Mesh> mesh;  // set for piecewise-linear fields

  double u(const Vec& x) const { return f.value(x); }
  Vec du(const Vec& x) const { return f.grad(x); }
};

/// Closed-form library on the half plane {x2 >= 0} (d = 2, A = I):
///   "homogeneous"        u = Re (x1 + i x2)^k,          V = 0,       eta = 0
///   "robin-cosexp"       u = cos(k x1) e^(m x2),        V = m^2-k^2, eta = -m
///                        (param m defaults to k)
///   "robin-cosexp-decay" u = cos(k x1) e^(-k x2),       V = 0,       eta = +k
///   "robin-exponential"  u = e^(eta0 x2),               V = eta0^2,  eta = -eta0
///   "robin-tilted"       u = e^(m x2 + c x1 x2),        variable V and eta
///   "robin-eigen"        u = J0(sqrt(lambda)|x|) with lambda from the radial
///                        shooting oracle for u'(1) + sigma u(1) = 0;
///                        V = -lambda, eta = 0
/// Optional param "radius" sets the half-ball radius (default 2).
Solution analytic_solution(const std::string& name,
                           const std::map<std::string, double>& params = {});

/// Names of the built-in solutions, alphabetized.
std::vector<std::string> solution_catalogue();

/// First eigenvalue of the radial Robin problem on the unit disk,
///   u'' + u'/s + lambda u = 0, u'(1) + sigma u(1) = 0,
/// located by RK4 shooting and bisection.
double first_robin_disk_eigenvalue(double sigma);

/// Conforming triangulation of the half disk B_R^+ (d = 2) with tagged
/// flat-boundary edges and curved-arc nodes. n_rings concentric rings,
/// element size h ~ R / n_rings.
struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 2>> flat_edges;  // on {x2 = 0}
  std::vector<int> arc_nodes;                  // on {|x| = R}
  double radius = 1.0;
  double h = 0.0;

  static Mesh half_disk(double radius, int n_rings);
  double min_angle_deg() const;

  void write(std::ostream& os) const;  // plain-text node/element lists
  static Mesh read(std::istream& is);
};

/// P1 finite elements for the Robin problem of cs on the half disk, with
/// Dirichlet data on the curved arc. The Robin term enters the bilinear
/// form as the boundary mass -int_Gamma eta u v; eta may change sign.
/// Throws numerical_error if the system is singular.
Solution solve_robin_fem(const std::shared_ptr<const CoefficientSet>& cs,
                         const Mesh& mesh, const ScalarField& arc_data);

/// (u, Du) at x. FEM gradients are element-local; analytic by closure.
std::pair<double, Vec> eval_solution(const Solution& sol, const Vec& x);

/// Max over a fixed family of smooth test functions v (vanishing to second
/// order on the sphere |x| = r but not on Gamma_r) of |a(u, v)| / ||v||_H1
/// where a(u,v) = int <A Du, Dv> + int V u v - int_Gamma eta u v.
/// Piecewise-linear solutions carrying their mesh are integrated
/// element-wise (with r snapped to the mesh radius); smooth fields use the
/// spectral product rules.
double weak_form_residual(const Solution& sol, const CoefficientSet& cs,
                          double r, const QuadratureSpec& spec = {});

/// L2 distance between a solution and a reference on B_r^+ (element-wise
/// for mesh-backed solutions with r at the mesh radius).
double l2_error(const Solution& sol, const ScalarField& reference, double r,
                const QuadratureSpec& spec = {});

}  // namespace ucw
