#pragma once

#include <map>
#include <string>
#include <vector>

#include "shapeopt/fem.hpp"
#include "shapeopt/mesh.hpp"

namespace shapeopt {

// Point-data fields for VTK export; scalars and vectors share one
// POINT_DATA block. Missing entries are written as zero.
struct VtkFields {
  std::vector<std::pair<std::string, std::vector<double>>> scalars;  // per node
  std::vector<std::pair<std::string, std::vector<Vec3>>> vectors;    // per node

  void add_scalar(const std::string& name, const Mesh& mesh, const std::map<int, double>& values,
                  bool log_scale = false);
  void add_vector(const std::string& name, const DisplacementField& u);
};

// VTK legacy ASCII writer; fixed %.9e formatting keeps output byte-stable.
void write_vtk(const std::string& path, const Mesh& mesh, const VtkFields& fields = {});

// Minimal reader for round-trip checks: points and cell connectivity only.
struct VtkMesh {
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
};
VtkMesh read_vtk_points(const std::string& path);

}  // namespace shapeopt
