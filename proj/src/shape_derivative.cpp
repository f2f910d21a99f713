#include "shapeopt/shape_derivative.hpp"

#include <cmath>

namespace shapeopt {

double reynolds_volume(const Mesh& mesh, const std::function<double(const Vec3&)>& density,
                       const std::function<double(const Vec3&)>& density_dot,
                       const VelocityField& V) {
  DisplacementField vh = V.interpolate(mesh);
  const auto& rule = tet_rule_deg2();
  double dj = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame fr = cell_frame(mesh, c);
    for (const auto& q : rule) {
      Vec3 x = fr.x0 + fr.jac * q.xi;
      double divv = eval_grad(mesh, vh, c, q.xi).trace();
      double w = q.w * fr.detJ;
      dj += w * (density_dot ? density_dot(x) : 0.0);
      dj += w * density(x) * divv;
    }
  }
  return dj;
}

double reynolds_surface(const Mesh& mesh, const std::function<double(const Vec3&)>& density,
                        const std::function<double(const Vec3&)>& density_dot,
                        const VelocityField& V) {
  DisplacementField vh = V.interpolate(mesh);
  const auto& rule = tri_rule_deg4();
  double dj = 0.0;
  for (const auto& f : mesh.facets) {
    const Vec3& p0 = mesh.nodes[f.nodes[0]];
    Vec3 e1 = mesh.nodes[f.nodes[1]] - p0;
    Vec3 e2 = mesh.nodes[f.nodes[2]] - p0;
    Vec3 nw = e1.cross(e2);
    double jac2 = nw.norm();
    Vec3 n = nw / jac2;
    CellFrame fr = cell_frame(mesh, f.cell);
    Vec3 cc = fr.x0 + fr.jac * Vec3(0.25, 0.25, 0.25);
    if (n.dot(p0 + (e1 + e2) / 3.0 - cc) < 0) n = -n;
    for (const auto& q : rule) {
      Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
      Vec3 xi = fr.jac_inv * (x - fr.x0);
      Mat3 dv = eval_grad(mesh, vh, f.cell, xi);
      double div_g = dv.trace() - n.dot(dv * n);
      double w = q.w * jac2;
      dj += w * (density_dot ? density_dot(x) : 0.0);
      dj += w * density(x) * div_g;
    }
  }
  return dj;
}

double dj_material_form(const Mesh& mesh, const DisplacementField& u,
                        const DisplacementField& udot, const MaterialParams& mat,
                        const LocalDensity& density, const VelocityField& V) {
  DisplacementField vh = V.interpolate(mesh);
  double dj = 0.0;
  if (density.kind() == FunctionalKind::VOLUME) {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Vec3 uu = eval_field(mesh, u, c, q.xi);
        Mat3 du = eval_grad(mesh, u, c, q.xi);
        Mat3 sig = elastic_map(du, mat.lambda, mat.mu);
        Vec3 vv = eval_field(mesh, vh, c, q.xi);
        Mat3 dv = eval_grad(mesh, vh, c, q.xi);
        Mat3 sig_dot = elastic_map(eval_grad(mesh, udot, c, q.xi) - du * dv, mat.lambda, mat.mu);
        double w = q.w * fr.detJ;
        dj += w * (dv.trace() * density.value(x, uu, sig) + density.d_x(x, uu, sig).dot(vv) +
                   density.d_u(x, uu, sig).dot(eval_field(mesh, udot, c, q.xi)) +
                   ddot(density.d_sigma(x, uu, sig), sig_dot));
      }
    }
    return dj;
  }
  const auto& rule = tri_rule_deg4();
  for (const auto& f : mesh.facets) {
    if (mesh.is_dirichlet_facet(f) && !density.include_dirichlet_boundary) continue;
    const Vec3& p0 = mesh.nodes[f.nodes[0]];
    Vec3 e1 = mesh.nodes[f.nodes[1]] - p0;
    Vec3 e2 = mesh.nodes[f.nodes[2]] - p0;
    Vec3 nw = e1.cross(e2);
    double jac2 = nw.norm();
    Vec3 n = nw / jac2;
    CellFrame fr = cell_frame(mesh, f.cell);
    Vec3 cc = fr.x0 + fr.jac * Vec3(0.25, 0.25, 0.25);
    if (n.dot(p0 + (e1 + e2) / 3.0 - cc) < 0) n = -n;
    for (const auto& q : rule) {
      Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
      Vec3 xi = fr.jac_inv * (x - fr.x0);
      Vec3 uu = eval_field(mesh, u, f.cell, xi);
      Mat3 du = eval_grad(mesh, u, f.cell, xi);
      Mat3 sig = elastic_map(du, mat.lambda, mat.mu);
      Vec3 vv = eval_field(mesh, vh, f.cell, xi);
      Mat3 dv = eval_grad(mesh, vh, f.cell, xi);
      double div_g = dv.trace() - n.dot(dv * n);
      Mat3 sig_dot =
          elastic_map(eval_grad(mesh, udot, f.cell, xi) - du * dv, mat.lambda, mat.mu);
      double w = q.w * jac2;
      dj += w * (div_g * density.value(x, uu, sig) + density.d_x(x, uu, sig).dot(vv) +
                 density.d_u(x, uu, sig).dot(eval_field(mesh, udot, f.cell, xi)) +
                 ddot(density.d_sigma(x, uu, sig), sig_dot));
    }
  }
  return dj;
}

DisplacementField StateProblem::solve_state(const Mesh& on_mesh) const {
  LinearSystem sys = assemble_elasticity(on_mesh, mat);
  VecX rhs = assemble_load(
      on_mesh, loads.f ? VolumeLoad([this](const Vec3& x) { return loads.f_at(x); }) : VolumeLoad(),
      loads.g ? SurfaceLoad([this](const Vec3& x, int tag) { return loads.g_at(x, tag); })
              : SurfaceLoad());
  apply_dirichlet(on_mesh, sys, rhs, nullptr);
  return solve(on_mesh, sys, rhs, solver);
}

double StateProblem::value(const Mesh& on_mesh, const LocalDensity& density) const {
  DisplacementField u = solve_state(on_mesh);
  return evaluate_functional(on_mesh, u, mat, density);
}

FdResult fd_shape_derivative(const StateProblem& problem, const LocalDensity& density,
                             const VelocityField& V, double t, double h_max) {
  FdResult res;
  auto central = [&](double tt) {
    Mesh plus = flow_mesh(problem.mesh, V, tt, h_max);
    Mesh minus = flow_mesh(problem.mesh, V, -tt, h_max);
    return (problem.value(plus, density) - problem.value(minus, density)) / (2.0 * tt);
  };
  res.central[0] = central(t);
  res.central[1] = central(t / 2.0);
  res.central[2] = central(t / 4.0);
  res.value = res.central[2];
  double d1 = std::abs(res.central[0] - res.central[1]);
  double d2 = std::abs(res.central[1] - res.central[2]);
  res.slope = (d2 > 0) ? std::log2(d1 / d2) : 2.0;
  res.richardson = res.central[2] + (res.central[2] - res.central[1]) / 3.0;
  return res;
}

}  // namespace shapeopt
