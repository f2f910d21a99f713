#pragma once

#include <map>
#include <vector>

#include "shapeopt/mesh.hpp"
#include "shapeopt/surface.hpp"

namespace shapeopt {

// Discrete tangential calculus on the boundary triangulation (corner
// vertices). Vertices are indexed through a compact surface numbering.
struct SurfaceOperator {
  std::vector<int> vertices;          // surface index -> mesh vertex
  std::map<int, int> index_of;        // mesh vertex -> surface index
  std::map<int, Vec3> node_pos;       // positions of the surface vertices
  SparseMat stiffness;                // cotangent stiffness of -Laplace_Gamma (PSD)
  VecX lumped_mass;                   // 1/3 incident triangle area
  std::vector<std::array<int, 3>> tris;  // corner triangles (mesh vertex ids)
  std::vector<double> tri_area;
  std::vector<Vec3> tri_normal;       // unit outward

  int n() const { return static_cast<int>(vertices.size()); }

  // Per-triangle tangential gradient of a P1 vertex field.
  Vec3 tri_gradient(const std::map<int, double>& f, int tri) const;
  // Tangential Jacobian of a P1 vertex vector field on a triangle:
  // rows are gradients of the components (D_Gamma w, 3x3, rank <= 2).
  Mat3 tri_jacobian(const std::map<int, Vec3>& w, int tri) const;
  // Area-averaged vertex values of per-triangle quantities.
  std::map<int, Vec3> vertex_gradient(const std::map<int, double>& f) const;
  std::map<int, Mat3> vertex_jacobian(const std::map<int, Vec3>& w) const;

  // Surface integral of a vertex field (lumped).
  double integrate(const std::map<int, double>& f) const;
};

SurfaceOperator tangential_ops(const Mesh& mesh, const SurfaceGeometry& geom);

// Residual of the scalar tangential Stokes identity
//   int_G div_G(f v) dS = int_G kappa f <v,n> dS
// for given vertex fields; used as a mesh-quality diagnostic and test hook.
double tangential_stokes_residual(const SurfaceOperator& op, const SurfaceGeometry& geom,
                                  const std::map<int, double>& f,
                                  const std::map<int, Vec3>& v);

}  // namespace shapeopt
