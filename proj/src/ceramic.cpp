#include "shapeopt/ceramic.hpp"

#include <cmath>

#include "shapeopt/quadrature.hpp"

namespace shapeopt {

SphereQuadrature SphereQuadrature::gauss_product(int n_polar) {
  SphereQuadrature q;
  std::vector<double> x, w;
  gauss_legendre(n_polar, x, w);
  int n_az = 2 * n_polar;
  double waz = 2.0 * M_PI / n_az;
  q.nodes.reserve(n_polar * n_az);
  q.weights.reserve(n_polar * n_az);
  for (int i = 0; i < n_polar; ++i) {
    double ct = x[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_az; ++j) {
      double phi = waz * (j + 0.5);
      q.nodes.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      q.weights.push_back(w[i] * waz);
    }
  }
  return q;
}

double SphereQuadrature::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double f_cer(const Mat3& sigma, const SphereQuadrature& quad, double m, double sigma_0) {
  if (m <= 1.0) throw NumericError("ceramic density needs m > 1");
  double acc = 0.0;
  for (size_t i = 0; i < quad.nodes.size(); ++i) {
    const Vec3& n = quad.nodes[i];
    double sn = n.dot(sigma * n);
    if (sn > 0.0) acc += quad.weights[i] * std::pow(sn / sigma_0, m);
  }
  return acc / (4.0 * M_PI);
}

Mat3 df_cer(const Mat3& sigma, const SphereQuadrature& quad, double m, double sigma_0) {
  if (m <= 1.0) throw NumericError("ceramic density needs m > 1");
  Mat3 acc = Mat3::Zero();
  for (size_t i = 0; i < quad.nodes.size(); ++i) {
    const Vec3& n = quad.nodes[i];
    double sn = n.dot(sigma * n);
    if (sn > 0.0)
      acc += (quad.weights[i] * m / sigma_0 * std::pow(sn / sigma_0, m - 1.0)) *
             (n * n.transpose());
  }
  return acc / (4.0 * M_PI);
}

}  // namespace shapeopt
