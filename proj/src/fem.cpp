#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "ucw/solutions.hpp"

namespace ucw {

namespace {

constexpr double kPi = 3.14159265358979323846;

using V2 = Eigen::Vector2d;

double signed_area(const V2& a, const V2& b, const V2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (c.x() - a.x()) * (b.y() - a.y()));
}

// Triangulates the strip between two concentric node rings given their
// angles, advancing the pointer with the smaller leading angle.
void triangulate_strip(const std::vector<int>& inner,
                       const std::vector<double>& ang_inner,
                       const std::vector<int>& outer,
                       const std::vector<double>& ang_outer,
                       std::vector<std::array<int, 3>>& tris) {
  size_t a = 0, b = 0;
  while (a + 1 < inner.size() || b + 1 < outer.size()) {
    const bool advance_outer =
        b + 1 < outer.size() &&
        (a + 1 >= inner.size() || ang_outer[b + 1] <= ang_inner[a + 1] + 1e-12);
    if (advance_outer) {
      tris.push_back({outer[b], outer[b + 1], inner[a]});
      ++b;
    } else {
      tris.push_back({inner[a], outer[b], inner[a + 1]});
      ++a;
    }
  }
}

}  // namespace

Mesh Mesh::half_disk(double radius, int n_rings) {
  if (!(radius > 0.0) || n_rings < 1)
    throw validation_error("half_disk: radius > 0 and n_rings >= 1 required");
  Mesh mesh;
  mesh.radius = radius;
  mesh.h = radius / n_rings;

  std::vector<std::vector<int>> rings(n_rings + 1);
  std::vector<std::vector<double>> angles(n_rings + 1);
  mesh.nodes.emplace_back(0.0, 0.0);
  rings[0] = {0};
  angles[0] = {0.0};
  for (int i = 1; i <= n_rings; ++i) {
    const int m = 4 * i;  // segments on the half circle of ring i
    const double s = radius * i / n_rings;
    for (int j = 0; j <= m; ++j) {
      const double th = kPi * j / m;
      // Snap the diameter endpoints onto {x2 = 0} exactly.
      const double x2 = (j == 0 || j == m) ? 0.0 : s * std::sin(th);
      mesh.nodes.emplace_back(j == m ? -s : s * std::cos(th), x2);
      rings[i].push_back(static_cast<int>(mesh.nodes.size()) - 1);
      angles[i].push_back(th);
    }
  }

  for (int i = 0; i < n_rings; ++i)
    triangulate_strip(rings[i], angles[i], rings[i + 1], angles[i + 1],
                      mesh.tris);
  for (auto& t : mesh.tris) {
    if (signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]) < 0.0)
      std::swap(t[1], t[2]);
  }

  // Boundary edges appear in exactly one triangle.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.tris)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      ++edge_count[{u, v}];
    }
  for (const auto& [edge, count] : edge_count) {
    if (count != 1) continue;
    const V2& p = mesh.nodes[edge.first];
    const V2& q = mesh.nodes[edge.second];
    if (std::abs(p.y()) < 1e-12 && std::abs(q.y()) < 1e-12)
      mesh.flat_edges.push_back({edge.first, edge.second});
  }
  for (int i = 0; i < static_cast<int>(mesh.nodes.size()); ++i)
    if (std::abs(mesh.nodes[i].norm() - radius) < 1e-9 * (1.0 + radius))
      mesh.arc_nodes.push_back(i);
  return mesh;
}

double Mesh::min_angle_deg() const {
  double worst = 180.0;
  for (const auto& t : tris) {
    for (int e = 0; e < 3; ++e) {
      const V2 a = nodes[t[e]];
      const V2 b = nodes[t[(e + 1) % 3]];
      const V2 c = nodes[t[(e + 2) % 3]];
      const V2 u = b - a, v = c - a;
      const double ang =
          std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
      worst = std::min(worst, ang * 180.0 / kPi);
    }
  }
  return worst;
}

void Mesh::write(std::ostream& os) const {
  os.precision(17);
  os << "halfdisk " << radius << " " << h << "\n";
  os << "nodes " << nodes.size() << "\n";
  for (const auto& p : nodes) os << p.x() << " " << p.y() << "\n";
  os << "triangles " << tris.size() << "\n";
  for (const auto& t : tris) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

Mesh Mesh::read(std::istream& is) {
  Mesh mesh;
  std::string tag;
  size_t n = 0;
  is >> tag >> mesh.radius >> mesh.h;
  if (tag != "halfdisk") throw validation_error("mesh read: bad header");
  is >> tag >> n;
  if (tag != "nodes") throw validation_error("mesh read: bad node header");
  mesh.nodes.resize(n);
  for (auto& p : mesh.nodes) is >> p.x() >> p.y();
  is >> tag >> n;
  if (tag != "triangles") throw validation_error("mesh read: bad element header");
  mesh.tris.resize(n);
  for (auto& t : mesh.tris) is >> t[0] >> t[1] >> t[2];
  if (!is) throw validation_error("mesh read: truncated file");

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.tris)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      ++edge_count[{u, v}];
    }
  for (const auto& [edge, count] : edge_count) {
    if (count != 1) continue;
    if (std::abs(mesh.nodes[edge.first].y()) < 1e-12 &&
        std::abs(mesh.nodes[edge.second].y()) < 1e-12)
      mesh.flat_edges.push_back({edge.first, edge.second});
  }
  for (int i = 0; i < static_cast<int>(mesh.nodes.size()); ++i)
    if (std::abs(mesh.nodes[i].norm() - mesh.radius) <
        1e-9 * (1.0 + mesh.radius))
      mesh.arc_nodes.push_back(i);
  return mesh;
}

namespace {

// Element-local piecewise-linear data: constant gradients of the three hat
// functions and the element area.
struct ElementGeometry {
  double area;
  Eigen::Matrix<double, 2, 3> grads;
};

ElementGeometry element_geometry(const Mesh& mesh, const std::array<int, 3>& t) {
  const V2 a = mesh.nodes[t[0]], b = mesh.nodes[t[1]], c = mesh.nodes[t[2]];
  ElementGeometry g;
  g.area = signed_area(a, b, c);
  const double inv = 1.0 / (2.0 * g.area);
  g.grads.col(0) = inv * V2(b.y() - c.y(), c.x() - b.x());
  g.grads.col(1) = inv * V2(c.y() - a.y(), a.x() - c.x());
  g.grads.col(2) = inv * V2(a.y() - b.y(), b.x() - a.x());
  return g;
}

// Shared state for the piecewise-linear evaluator: a uniform bin grid over
// the mesh for point location.
struct FemField {
  Mesh mesh;
  Vec dofs;
  std::vector<std::vector<int>> bins;
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, cell = 1.0;

  void build_bins() {
    cell = std::max(mesh.h, 1e-12);
    x0 = -mesh.radius;
    y0 = 0.0;
    nx = static_cast<int>(std::ceil(2.0 * mesh.radius / cell)) + 1;
    ny = static_cast<int>(std::ceil(mesh.radius / cell)) + 1;
    bins.assign(static_cast<size_t>(nx) * ny, {});
    for (int e = 0; e < static_cast<int>(mesh.tris.size()); ++e) {
      const auto& t = mesh.tris[e];
      double lx = 1e300, ly = 1e300, hx = -1e300, hy = -1e300;
      for (int v : t) {
        lx = std::min(lx, mesh.nodes[v].x());
        hx = std::max(hx, mesh.nodes[v].x());
        ly = std::min(ly, mesh.nodes[v].y());
        hy = std::max(hy, mesh.nodes[v].y());
      }
      const int i0 = std::clamp(int((lx - x0) / cell), 0, nx - 1);
      const int i1 = std::clamp(int((hx - x0) / cell), 0, nx - 1);
      const int j0 = std::clamp(int((ly - y0) / cell), 0, ny - 1);
      const int j1 = std::clamp(int((hy - y0) / cell), 0, ny - 1);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j)
          bins[static_cast<size_t>(j) * nx + i].push_back(e);
    }
  }

  // Containing element, or the least-violating candidate for points within
  // roundoff of the mesh boundary.
  int locate(const V2& p, V2& bary12) const {
    const int i = std::clamp(int((p.x() - x0) / cell), 0, nx - 1);
    const int j = std::clamp(int((p.y() - y0) / cell), 0, ny - 1);
    double best = -1e300;
    int best_e = -1;
    V2 best_b(0, 0);
    for (int e : bins[static_cast<size_t>(j) * nx + i]) {
      const auto& t = mesh.tris[e];
      const V2 a = mesh.nodes[t[0]], b = mesh.nodes[t[1]], c = mesh.nodes[t[2]];
      const double full = signed_area(a, b, c);
      const double l1 = signed_area(a, p, c) / full;
      const double l2 = signed_area(a, b, p) / full;
      const double l0 = 1.0 - l1 - l2;
      const double margin = std::min({l0, l1, l2});
      if (margin > best) {
        best = margin;
        best_e = e;
        best_b = V2(l1, l2);
      }
      if (margin >= 0.0) break;
    }
    if (best_e < 0 || best < -1e-6)
      throw validation_error("fem evaluation: point outside the mesh");
    bary12 = best_b;
    return best_e;
  }
};

}  // namespace

Solution solve_robin_fem(const std::shared_ptr<const CoefficientSet>& cs,
                         const Mesh& mesh, const ScalarField& arc_data) {
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<bool> dirichlet(n, false);
  for (int i : mesh.arc_nodes) dirichlet[i] = true;

  std::vector<Eigen::Triplet<double>> trip;
  Vec rhs = Vec::Zero(n);

  auto as_vec = [](const V2& p) { return vec2(p.x(), p.y()); };

  for (const auto& t : mesh.tris) {
    const ElementGeometry g = element_geometry(mesh, t);
    const V2 mids[3] = {0.5 * (mesh.nodes[t[0]] + mesh.nodes[t[1]]),
                        0.5 * (mesh.nodes[t[1]] + mesh.nodes[t[2]]),
                        0.5 * (mesh.nodes[t[2]] + mesh.nodes[t[0]])};
    // Hat-function values at the edge midpoints (rows: local node).
    static const double phi[3][3] = {
        {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}};
    Eigen::Matrix3d ke = Eigen::Matrix3d::Zero();
    for (int q = 0; q < 3; ++q) {
      const Vec xq = as_vec(mids[q]);
      const Mat Aq = cs->A(xq);
      const double Vq = cs->V ? cs->V(xq) : 0.0;
      const double wq = g.area / 3.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const Eigen::Vector2d Aga = Aq * g.grads.col(a);
          ke(a, b) += wq * (Aga.dot(g.grads.col(b)) +
                            Vq * phi[a][q] * phi[b][q]);
        }
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trip.emplace_back(t[a], t[b], ke(a, b));
  }

  // Robin boundary mass on the flat edges, 2-point Gauss per edge.
  const double gp = 0.5 / std::sqrt(3.0);
  for (const auto& e : mesh.flat_edges) {
    const V2 p = mesh.nodes[e[0]], q = mesh.nodes[e[1]];
    const double len = (q - p).norm();
    for (double s : {0.5 - gp, 0.5 + gp}) {
      const V2 xg = (1.0 - s) * p + s * q;
      const double etag = cs->eta ? cs->eta(as_vec(xg)) : 0.0;
      const double w = 0.5 * len;
      const double phiv[2] = {1.0 - s, s};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          trip.emplace_back(e[a], e[b], -w * etag * phiv[a] * phiv[b]);
    }
  }

  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());

  // Impose Dirichlet rows on the curved arc.
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      if (dirichlet[it.row()]) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
  K.prune(0.0);
  for (int i = 0; i < n; ++i)
    if (dirichlet[i])
      rhs[i] = arc_data(vec2(mesh.nodes[i].x(), mesh.nodes[i].y()));

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw numerical_error("solve_robin_fem: singular stiffness system");
  const Vec u = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw numerical_error("solve_robin_fem: back substitution failed");

  auto field = std::make_shared<FemField>();
  field->mesh = mesh;
  field->dofs = u;
  field->build_bins();

  Solution sol;
  sol.name = "fem(h=" + std::to_string(mesh.h) + ")";
  sol.provenance = Provenance::fem;
  sol.mesh_h = mesh.h;
  sol.problem = cs;
  sol.f.value = [field](const Vec& x) {
    V2 b;
    const int e = field->locate(V2(x[0], x[1]), b);
    const auto& t = field->mesh.tris[e];
    return (1.0 - b[0] - b[1]) * field->dofs[t[0]] + b[0] * field->dofs[t[1]] +
           b[1] * field->dofs[t[2]];
  };
  sol.f.grad = [field](const Vec& x) {
    V2 b;
    const int e = field->locate(V2(x[0], x[1]), b);
    const auto& t = field->mesh.tris[e];
    const ElementGeometry g = element_geometry(field->mesh, t);
    const V2 grad = field->dofs[t[0]] * g.grads.col(0) +
                    field->dofs[t[1]] * g.grads.col(1) +
                    field->dofs[t[2]] * g.grads.col(2);
    return vec2(grad.x(), grad.y());
  };
  sol.residual_estimate =
      weak_form_residual(sol, *cs, 0.9 * mesh.radius, QuadratureSpec{32, 64});
  return sol;
}

}  // namespace ucw
