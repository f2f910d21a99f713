#include "shapeopt/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace shapeopt {

const std::vector<QPoint>& tet_rule_deg2() {
  static const std::vector<QPoint> rule = [] {
    const double a = 0.5854101966249685;  // (5+3*sqrt(5))/20
    const double b = 0.1381966011250105;  // (5-sqrt(5))/20
    const double w = 1.0 / 24.0;          // 1/4 of reference volume 1/6
    std::vector<QPoint> r;
    r.push_back({Vec3(a, b, b), w});
    r.push_back({Vec3(b, a, b), w});
    r.push_back({Vec3(b, b, a), w});
    r.push_back({Vec3(b, b, b), w});
    return r;
  }();
  return rule;
}

const std::vector<QPoint>& tri_rule_deg4() {
  static const std::vector<QPoint> rule = [] {
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    std::vector<QPoint> r;
    // tabulated weights sum to 1; scale to reference area 1/2
    auto add = [&r](double x, double y, double w) { r.push_back({Vec3(x, y, 0.0), 0.5 * w}); };
    add(a1, a1, w1);
    add(1 - 2 * a1, a1, w1);
    add(a1, 1 - 2 * a1, w1);
    add(a2, a2, w2);
    add(1 - 2 * a2, a2, w2);
    add(a2, 1 - 2 * a2, w2);
    return r;
  }();
  return rule;
}

namespace {

// Gauss-Jacobi rule for weight (1-x)^alpha on [-1,1] by Golub-Welsch:
// nodes are eigenvalues of the symmetric recurrence matrix, weights come
// from the first eigenvector components.
void gauss_jacobi(int n, double alpha, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  J(0, 0) = -alpha / (alpha + 2.0);
  for (int k = 1; k < n; ++k) {
    J(k, k) = -alpha * alpha / ((2.0 * k + alpha) * (2.0 * k + alpha + 2.0));
    double num = 2.0 * k * (k + alpha) / (2.0 * k + alpha);
    double b2 = num * num / ((2.0 * k + alpha + 1.0) * (2.0 * k + alpha - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, alpha + 1.0) / (alpha + 1.0);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  gauss_jacobi(n, 0.0, x, w);
}

// Conical product rules (Stroud). The Jacobi factors absorb the simplex
// volume element so the mapped rule is exact to degree 2n-1.
std::vector<QPoint> tri_rule_conical(int n) {
  std::vector<double> xg, wg, xj, wj;
  gauss_jacobi(n, 0.0, xg, wg);
  gauss_jacobi(n, 1.0, xj, wj);
  std::vector<QPoint> r;
  r.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    double u = 0.5 * (xj[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      double v = 0.5 * (xg[j] + 1.0);
      // x = u, y = (1-u) v; jacobian (1-u) sits in the alpha=1 weight
      double w = 0.125 * wj[i] * wg[j];
      r.push_back({Vec3(u, (1.0 - u) * v, 0.0), w});
    }
  }
  return r;
}

std::vector<QPoint> tet_rule_conical(int n) {
  std::vector<double> xg, wg, xj1, wj1, xj2, wj2;
  gauss_jacobi(n, 0.0, xg, wg);
  gauss_jacobi(n, 1.0, xj1, wj1);
  gauss_jacobi(n, 2.0, xj2, wj2);
  std::vector<QPoint> r;
  r.reserve(n * n * n);
  for (int i = 0; i < n; ++i) {
    double u = 0.5 * (xj2[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      double v = 0.5 * (xj1[j] + 1.0);
      for (int k = 0; k < n; ++k) {
        double t = 0.5 * (xg[k] + 1.0);
        double w = wj2[i] * wj1[j] * wg[k] / 64.0;
        r.push_back({Vec3(u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * t), w});
      }
    }
  }
  return r;
}

}  // namespace shapeopt
