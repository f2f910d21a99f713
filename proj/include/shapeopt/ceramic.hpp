#pragma once

#include <vector>

#include "shapeopt/types.hpp"

namespace shapeopt {

// Unit-sphere quadrature: Gauss-Legendre in cos(theta) times a uniform
// azimuth grid. n_polar points give polynomial exactness of degree
// 2*n_polar - 1; the default (24) integrates degree 47 exactly, which covers
// Weibull moduli up to 20 with margin. Weights sum to 4*pi.
struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  static SphereQuadrature gauss_product(int n_polar = 24);
  double total_weight() const;
};

// Tensile crack-initiation density: the positive normal stress sigma_n^+
// over the crack-plane normals, averaged over the sphere,
//   f_cer(sigma) = 1/(4 pi) sum_i w_i (max(0, n_i . sigma n_i) / sigma_0)^m
// and its derivative with respect to sigma. Requires m > 1.
double f_cer(const Mat3& sigma, const SphereQuadrature& quad, double m, double sigma_0);
Mat3 df_cer(const Mat3& sigma, const SphereQuadrature& quad, double m, double sigma_0);

}  // namespace shapeopt
