#include "shapeopt/surface.hpp"

#include <cmath>

namespace shapeopt {

SurfaceGeometry surface_geometry(const Mesh& mesh) {
  SurfaceGeometry g;
  g.facet_normals.resize(mesh.facets.size());

  std::map<int, Vec3> area_normal;   // area-weighted normal accumulator
  std::map<int, Vec3> laplace_x;     // cotangent Laplacian applied to coordinates
  for (size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const Facet& f = mesh.facets[fi];
    const Vec3& a = mesh.nodes[f.nodes[0]];
    const Vec3& b = mesh.nodes[f.nodes[1]];
    const Vec3& c = mesh.nodes[f.nodes[2]];
    Vec3 n = (b - a).cross(c - a);
    double area2 = n.norm();
    if (area2 < 2e-14) throw MeshError("degenerate surface triangle " + std::to_string(fi));
    n /= area2;
    // orient outward: away from the owning cell centroid
    const auto& cl = mesh.cells[f.cell];
    Vec3 cc = 0.25 * (mesh.nodes[cl[0]] + mesh.nodes[cl[1]] + mesh.nodes[cl[2]] + mesh.nodes[cl[3]]);
    Vec3 fc = (a + b + c) / 3.0;
    if (n.dot(fc - cc) < 0.0) n = -n;
    g.facet_normals[fi] = n;

    double area = 0.5 * area2;
    for (int k = 0; k < 3; ++k) zsum(area_normal, f.nodes[k]) += area * n;
    // cotangent contributions and mixed (Voronoi) vertex areas
    const int idx[3] = {f.nodes[0], f.nodes[1], f.nodes[2]};
    const Vec3* x[3] = {&a, &b, &c};
    double cot_at[3];
    bool obtuse = false;
    int obtuse_at = -1;
    for (int k = 0; k < 3; ++k) {
      int i = (k + 1) % 3, j = (k + 2) % 3;
      Vec3 u = *x[i] - *x[k], v = *x[j] - *x[k];
      double d = u.dot(v);
      cot_at[k] = d / u.cross(v).norm();
      if (d < 0) {
        obtuse = true;
        obtuse_at = k;
      }
    }
    for (int k = 0; k < 3; ++k) {
      int i = (k + 1) % 3, j = (k + 2) % 3;  // edge (i,j) opposite vertex k
      Vec3 e = *x[j] - *x[i];
      zsum(laplace_x, idx[i]) += 0.5 * cot_at[k] * e;
      zsum(laplace_x, idx[j]) -= 0.5 * cot_at[k] * e;
      if (!obtuse) {
        double lj2 = (*x[i] - *x[k]).squaredNorm();
        double li2 = (*x[j] - *x[k]).squaredNorm();
        g.vertex_area[idx[k]] += (lj2 * cot_at[j] + li2 * cot_at[i]) / 8.0;
      } else {
        g.vertex_area[idx[k]] += (k == obtuse_at) ? area / 2.0 : area / 4.0;
      }
    }
  }
  for (auto& [v, an] : area_normal) {
    Vec3 n = an.normalized();
    g.vertex_normals[v] = n;
    // kappa n = -Delta_Gamma x ; lumped-mass scaling, signed projection
    Vec3 k_vec = -laplace_x[v] / g.vertex_area[v];
    g.mean_curvature[v] = k_vec.dot(n);
  }
  return g;
}

}  // namespace shapeopt
