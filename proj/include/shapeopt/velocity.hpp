#pragma once

#include <functional>
#include <optional>

#include "shapeopt/fem.hpp"
#include "shapeopt/mesh.hpp"
#include "shapeopt/surface.hpp"

namespace shapeopt {

// Perturbation field V with its space derivative DV. Analytic fields carry
// callbacks; nodal fields live on the mesh FE space (per-cell gradients).
// Assembly routines always sample V through the FE interpolant so that
// discrete identities hold exactly; the flow integrator uses the callbacks.
struct VelocityField {
  std::function<Vec3(const Vec3&)> eval;
  std::function<Mat3(const Vec3&)> grad;
  std::optional<DisplacementField> nodal;  // set for fields produced by descent
  bool dirichlet_safe = false;             // V = 0 on a neighborhood of Gamma_D

  static VelocityField analytic(std::function<Vec3(const Vec3&)> v,
                                std::function<Mat3(const Vec3&)> dv, bool dirichlet_safe = false);
  static VelocityField from_nodal(const Mesh& mesh, DisplacementField w,
                                  bool dirichlet_safe = false);

  // FE interpolant values: nodal coefficients on the given mesh.
  DisplacementField interpolate(const Mesh& mesh) const;
  // Value/gradient of the FE interpolant inside a cell.
  Vec3 fe_value(const Mesh& mesh, const DisplacementField& vh, int c, const Vec3& xi) const;
  Mat3 fe_grad(const Mesh& mesh, const DisplacementField& vh, int c, const Vec3& xi) const;

  void check_dirichlet_safe(const Mesh& mesh) const;  // throws on violation
};

enum class MapFamily { FLOW, PERTURBATION };

// Transport quantities of the map T_t at a set of points.
struct Transport {
  double t = 0.0;
  std::vector<Vec3> mapped;     // y(t, x)
  std::vector<Mat3> jacobian;   // DT_t per point
  std::vector<double> gamma;    // det DT_t
  // surface data (only for points flagged as boundary vertices)
  std::vector<double> omega;    // |gamma DT^{-T} n0|
  std::vector<Vec3> normal_t;   // transported unit normal
};

// Integrates dy/dt = V(y) and dJ/dt = DV(y) J by classic RK4 with step
// count ceil(|t| / h_max). `normals` supplies reference normals for the
// surface quantities (empty entries allowed; use Vec3::Zero()).
Transport flow_map(const VelocityField& V, double t, const std::vector<Vec3>& points,
                   const std::vector<Vec3>& normals = {}, double h_max = 1e-2,
                   MapFamily family = MapFamily::FLOW);

// Flows mesh corner vertices along V (RK4) and rebuilds mid-edge nodes.
// Throws on cell inversion.
Mesh flow_mesh(const Mesh& mesh, const VelocityField& V, double t, double h_max = 1e-2,
               MapFamily family = MapFamily::FLOW);

// div_Gamma V at a boundary vertex from the analytic gradient and the
// discrete outward normal.
double surface_divergence(const VelocityField& V, const Vec3& x, const Vec3& n);

}  // namespace shapeopt
