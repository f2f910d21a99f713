#pragma once

#include <memory>

#include "shapeopt/ceramic.hpp"
#include "shapeopt/fem.hpp"
#include "shapeopt/lcf.hpp"

namespace shapeopt {

enum class FunctionalKind { VOLUME, SURFACE_U, SURFACE_SIGMA };

// First-order local cost density F(x, u, sigma(u)) with partial derivatives.
// VOLUME kinds integrate over the domain, SURFACE_* over the Neumann
// boundary (optionally all of it).
class LocalDensity {
 public:
  virtual ~LocalDensity() = default;
  virtual FunctionalKind kind() const = 0;
  virtual double value(const Vec3& x, const Vec3& u, const Mat3& sigma) const = 0;
  virtual Vec3 d_x(const Vec3& x, const Vec3& u, const Mat3& sigma) const {
    (void)x; (void)u; (void)sigma;
    return Vec3::Zero();
  }
  virtual Vec3 d_u(const Vec3& x, const Vec3& u, const Mat3& sigma) const {
    (void)x; (void)u; (void)sigma;
    return Vec3::Zero();
  }
  virtual Mat3 d_sigma(const Vec3& x, const Vec3& u, const Mat3& sigma) const {
    (void)x; (void)u; (void)sigma;
    return Mat3::Zero();
  }
  // Surface densities may be restricted to the Neumann part (default) or
  // integrated over the whole boundary.
  bool include_dirichlet_boundary = false;
};

// F_vol == 1: J = |Omega|; the canonical Reynolds test functional.
class VolumeDensity : public LocalDensity {
 public:
  FunctionalKind kind() const override { return FunctionalKind::VOLUME; }
  double value(const Vec3&, const Vec3&, const Mat3&) const override { return 1.0; }
};

// F_sur == 1 on Gamma_N: J = |Gamma_N|.
class SurfaceAreaDensity : public LocalDensity {
 public:
  FunctionalKind kind() const override { return FunctionalKind::SURFACE_U; }
  double value(const Vec3&, const Vec3&, const Mat3&) const override { return 1.0; }
};

// F_vol = sigma : A for a constant symmetric A (compliance-like test case).
class StressMomentDensity : public LocalDensity {
 public:
  explicit StressMomentDensity(const Mat3& A) : A_(sym(A)) {}
  FunctionalKind kind() const override { return FunctionalKind::VOLUME; }
  double value(const Vec3&, const Vec3&, const Mat3& s) const override { return ddot(A_, s); }
  Mat3 d_sigma(const Vec3&, const Vec3&, const Mat3&) const override { return A_; }

 private:
  Mat3 A_;
};

// Compliance F_vol = sigma : eps(sigma), with eps recovered from sigma.
class ComplianceDensity : public LocalDensity {
 public:
  explicit ComplianceDensity(const MaterialParams& mat) : lambda_(mat.lambda), mu_(mat.mu) {}
  FunctionalKind kind() const override { return FunctionalKind::VOLUME; }
  double value(const Vec3&, const Vec3&, const Mat3& s) const override {
    return ddot(s, strain_of(s));
  }
  Mat3 d_sigma(const Vec3&, const Vec3&, const Mat3& s) const override {
    return 2.0 * strain_of(s);
  }

 private:
  Mat3 strain_of(const Mat3& s) const {
    return (s - lambda_ / (3.0 * lambda_ + 2.0 * mu_) * s.trace() * Mat3::Identity()) /
           (2.0 * mu_);
  }
  double lambda_, mu_;
};

// F_sur(x, u) = <w(x), u>: a derivative-free surface density (test case).
class SurfaceDisplacementDensity : public LocalDensity {
 public:
  explicit SurfaceDisplacementDensity(std::function<Vec3(const Vec3&)> w) : w_(std::move(w)) {}
  FunctionalKind kind() const override { return FunctionalKind::SURFACE_U; }
  double value(const Vec3& x, const Vec3& u, const Mat3&) const override {
    return w_(x).dot(u);
  }
  Vec3 d_u(const Vec3& x, const Vec3&, const Mat3&) const override { return w_(x); }
  Vec3 d_x(const Vec3&, const Vec3&, const Mat3&) const override { return Vec3::Zero(); }

 private:
  std::function<Vec3(const Vec3&)> w_;
};

// Ceramic volume density f_cer(sigma).
class CeramicDensity : public LocalDensity {
 public:
  CeramicDensity(const MaterialParams& mat, int n_polar = 24)
      : quad_(SphereQuadrature::gauss_product(n_polar)), m_(mat.m), s0_(mat.sigma_0) {}
  FunctionalKind kind() const override { return FunctionalKind::VOLUME; }
  double value(const Vec3&, const Vec3&, const Mat3& s) const override {
    return f_cer(s, quad_, m_, s0_);
  }
  Mat3 d_sigma(const Vec3&, const Vec3&, const Mat3& s) const override {
    return df_cer(s, quad_, m_, s0_);
  }
  const SphereQuadrature& quadrature() const { return quad_; }

 private:
  SphereQuadrature quad_;
  double m_, s0_;
};

// LCF surface density f_lcf(sigma) = N_det(sigma)^{-m}.
class LcfDensity : public LocalDensity {
 public:
  explicit LcfDensity(const MaterialParams& mat) : chain_(mat) {}
  FunctionalKind kind() const override { return FunctionalKind::SURFACE_SIGMA; }
  double value(const Vec3&, const Vec3&, const Mat3& s) const override {
    return chain_.f_lcf(s);
  }
  Mat3 d_sigma(const Vec3&, const Vec3&, const Mat3& s) const override {
    return chain_.df_lcf(s);
  }
  const LcfChain& chain() const { return chain_; }

 private:
  LcfChain chain_;
};

// Evaluates J(Omega, u) by cell/facet quadrature. Surface densities use the
// owner-cell stress at facet quadrature points.
double evaluate_functional(const Mesh& mesh, const DisplacementField& u,
                           const MaterialParams& mat, const LocalDensity& density);

// Per-boundary-vertex density d(x) of a surface functional (vertex-averaged
// stress), for export and for locating the critical region.
std::map<int, double> surface_density_at_vertices(const Mesh& mesh, const DisplacementField& u,
                                                  const MaterialParams& mat,
                                                  const LocalDensity& density,
                                                  const SurfaceGeometry& geom);

}  // namespace shapeopt
