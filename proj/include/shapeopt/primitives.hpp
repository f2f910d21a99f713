#pragma once

#include "shapeopt/mesh.hpp"

namespace shapeopt {

// Reference tetrahedron (0, e1, e2, e3) with its four faces tagged 1..4.
// Tag 1 is DIRICHLET, the rest NEUMANN.
Mesh make_reference_tet();

// Axis-aligned box [0,a]x[0,b]x[0,c] on an nx x ny x nz vertex grid
// (6 tets per hex). Face tags: 1 x=0, 2 x=a, 3 y=0, 4 y=b, 5 z=0, 6 z=c.
// By default tag 1 is DIRICHLET and the rest NEUMANN.
Mesh make_box(double a, double b, double c, int nx, int ny, int nz);
inline Mesh make_unit_cube(int n) { return make_box(1, 1, 1, n, n, n); }

// Ball of given radius meshed by coning a subdivided-icosahedron surface to
// the center. Surface facets are tag 2 (NEUMANN) except a bottom cap
// (z < -0.9 r) tagged 1 (DIRICHLET) so assembled systems stay Korn-valid.
Mesh make_icosphere_ball(double radius, int subdivisions);

// Bent-rod family: circular-arc centerline in the x-z plane with chord
// `length` along x, rise `height` at mid-arc, circular cross-section of
// the given diameter. Arc end at +x is tag 1 (DIRICHLET, clamped), the
// other end tag 2 (NEUMANN, loaded), lateral surface tag 3 (NEUMANN).
//
// n_segments: arc subdivisions; n_rings: cross-section rings (vertex count
// per section grows quadratically with n_rings).
struct RodParams {
  double length = 6.0;    // chord, mm
  double height = 3.0;    // mid-arc rise, mm
  double diameter = 1.0;  // mm
  int n_segments = 48;
  int n_rings = 2;
};
Mesh make_bent_rod(const RodParams& p);

}  // namespace shapeopt
