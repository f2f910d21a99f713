#include "shapeopt/functionals.hpp"

namespace shapeopt {

double evaluate_functional(const Mesh& mesh, const DisplacementField& u,
                           const MaterialParams& mat, const LocalDensity& density) {
  double J = 0.0;
  if (density.kind() == FunctionalKind::VOLUME) {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Mat3 s = stress_at(mesh, u, mat, c, q.xi);
        J += q.w * fr.detJ * density.value(x, eval_field(mesh, u, c, q.xi), s);
      }
    }
    return J;
  }
  const auto& rule = tri_rule_deg4();
  for (const auto& f : mesh.facets) {
    if (mesh.is_dirichlet_facet(f) && !density.include_dirichlet_boundary) continue;
    const Vec3& p0 = mesh.nodes[f.nodes[0]];
    Vec3 e1 = mesh.nodes[f.nodes[1]] - p0;
    Vec3 e2 = mesh.nodes[f.nodes[2]] - p0;
    double jac2 = e1.cross(e2).norm();
    CellFrame fr = cell_frame(mesh, f.cell);
    for (const auto& q : rule) {
      Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
      Vec3 xi = fr.jac_inv * (x - fr.x0);  // owner-cell reference coordinates
      Mat3 s = stress_at(mesh, u, mat, f.cell, xi);
      J += q.w * jac2 * density.value(x, eval_field(mesh, u, f.cell, xi), s);
    }
  }
  return J;
}

std::map<int, double> surface_density_at_vertices(const Mesh& mesh, const DisplacementField& u,
                                                  const MaterialParams& mat,
                                                  const LocalDensity& density,
                                                  const SurfaceGeometry& geom) {
  BoundaryStress bs = boundary_stress(mesh, u, mat, geom);
  std::map<int, double> d;
  for (const auto& [v, s] : bs.sigma) d[v] = density.value(mesh.nodes[v], u.at_node(v), s);
  return d;
}

}  // namespace shapeopt
