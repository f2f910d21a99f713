#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "shapeopt/types.hpp"

namespace shapeopt {

enum class BoundaryRole { DIRICHLET, NEUMANN };

// Boundary facet: corner vertices first, mid-edge nodes after (degree 2).
// Facets are matched to their owner cell at construction time.
struct Facet {
  std::array<int, 6> nodes;  // n[0..2] corners, n[3..5] mid-edges (degree 2)
  int tag = 0;
  int cell = -1;        // owning cell
  int local_face = -1;  // face index within the owning cell
};

// Tetrahedral mesh, degree 1 (4-node cells) or 2 (10-node cells).
// Mid-edge nodes of degree-2 meshes sit at edge midpoints; geometry is
// straight-sided, so the corner vertices fully determine the shape.
//
// Immutable after construction; deformation and refinement return new meshes.
struct Mesh {
  int degree = 1;
  std::vector<Vec3> nodes;                    // all nodes (corners first)
  int n_vertices = 0;                         // corner vertex count
  std::vector<std::array<int, 10>> cells;     // nodes 0..3 corners, 4..9 mid-edges
  std::vector<Facet> facets;                  // tagged boundary facets
  std::map<int, BoundaryRole> tag_map;        // region tag -> role

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int nodes_per_cell() const { return degree == 1 ? 4 : 10; }
  int nodes_per_facet() const { return degree == 1 ? 3 : 6; }

  BoundaryRole role_of(int tag) const;
  bool is_dirichlet_facet(const Facet& f) const { return role_of(f.tag) == BoundaryRole::DIRICHLET; }

  double cell_volume(int c) const;
  double total_volume() const;
  double facet_area(int f) const;

  // Nodes lying on boundary facets of a given role (all nodes, not just corners).
  std::vector<int> boundary_nodes(BoundaryRole role) const;
  std::vector<int> boundary_nodes() const;
  // Boundary corner vertices (index < n_vertices), any role.
  std::vector<int> boundary_vertices() const;

  // Geometry invariant checks; throw MeshError on violation.
  void validate() const;
};

struct MeshQuality {
  double min_volume_ratio = 0.0;  // min over cells of V / V_regular(h_max)
  double min_dihedral = 0.0;      // radians
};

// Builds the facet->cell ownership links and checks boundary coverage.
// `facets` must list every exterior triangle exactly once (corner nodes only
// required; mid-edge entries are filled in for degree-2 meshes).
void link_facets(Mesh& mesh);

// Mid-edge node insertion; returns a degree-2 mesh over the same geometry.
Mesh to_p2(const Mesh& p1);

// Uniform refinement (each tet split into 8). Degree-1 meshes only;
// refine first, then convert with to_p2.
Mesh refine_uniform(const Mesh& mesh);

// New mesh with nodes x + scale*d(x). For degree-2 meshes the mid-edge nodes
// are re-midpointed from the displaced corners when `remidpoint` is set.
Mesh deform(const Mesh& mesh, const std::vector<Vec3>& displacement, double scale,
            bool remidpoint = true);

MeshQuality quality(const Mesh& mesh);

// Signed volume of the tet spanned by four points.
double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

}  // namespace shapeopt
