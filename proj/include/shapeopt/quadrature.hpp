#pragma once

#include <array>
#include <vector>

#include "shapeopt/types.hpp"

namespace shapeopt {

// Quadrature point in reference coordinates with weight.
// Tet reference: x,y,z >= 0, x+y+z <= 1 (volume 1/6).
// Triangle reference: x,y >= 0, x+y <= 1 (area 1/2).
struct QPoint {
  Vec3 xi;
  double w;  // weights sum to the reference measure
};

// 4-point rule, exact for polynomials of total degree 2 on the tetrahedron.
const std::vector<QPoint>& tet_rule_deg2();

// 6-point rule, exact to degree 4 on the triangle.
const std::vector<QPoint>& tri_rule_deg4();

// Conical-product (Gauss-Jacobi) rules of arbitrary exactness, used as
// independent oracles and for error norms. n points per direction gives
// exactness degree 2n-1.
std::vector<QPoint> tet_rule_conical(int n);
std::vector<QPoint> tri_rule_conical(int n);

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace shapeopt
