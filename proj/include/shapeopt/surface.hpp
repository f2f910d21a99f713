#pragma once

#include <map>
#include <vector>

#include "shapeopt/mesh.hpp"

namespace shapeopt {

// Discrete boundary geometry built on the corner-vertex triangulation.
// Normals point outward (checked against the owner cell); the mean
// curvature kappa = div_Gamma(n) comes from the cotangent Laplacian of the
// coordinate functions with lumped-mass scaling, sign fixed by projection
// onto the outward vertex normal (kappa = 2/R on a sphere of radius R).
struct SurfaceGeometry {
  std::vector<Vec3> facet_normals;          // per boundary facet, unit outward
  std::map<int, Vec3> vertex_normals;       // boundary vertex -> unit outward normal
  std::map<int, double> mean_curvature;     // boundary vertex -> kappa (1/mm)
  std::map<int, double> vertex_area;        // lumped (1/3 incident area)

  const Vec3& normal_at(int v) const { return vertex_normals.at(v); }
  double kappa_at(int v) const { return mean_curvature.at(v); }
};

SurfaceGeometry surface_geometry(const Mesh& mesh);

}  // namespace shapeopt
