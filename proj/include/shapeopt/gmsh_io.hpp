#pragma once

#include <iosfwd>
#include <string>

#include "shapeopt/mesh.hpp"

namespace shapeopt {

// Gmsh MSH 2.2 ASCII reader. Volume elements of type 4 (tet4) or 11 (tet10);
// boundary triangles of type 2 (tri3) or 9 (tri6) carry the physical tag.
// `tag_roles` maps physical tags to boundary roles; when empty, the smallest
// tag becomes DIRICHLET and all others NEUMANN.
Mesh read_gmsh(const std::string& path, std::map<int, BoundaryRole> tag_roles = {});
Mesh read_gmsh(std::istream& in, std::map<int, BoundaryRole> tag_roles = {});

// Writer for the same subset of MSH 2.2 (used by the rod generator).
void write_gmsh(const std::string& path, const Mesh& mesh);

}  // namespace shapeopt
