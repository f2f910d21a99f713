#include "shapeopt/velocity.hpp"

#include <cmath>

namespace shapeopt {

VelocityField VelocityField::analytic(std::function<Vec3(const Vec3&)> v,
                                      std::function<Mat3(const Vec3&)> dv, bool safe) {
  VelocityField f;
  f.eval = std::move(v);
  f.grad = std::move(dv);
  f.dirichlet_safe = safe;
  return f;
}

VelocityField VelocityField::from_nodal(const Mesh& mesh, DisplacementField w, bool safe) {
  VelocityField f;
  f.nodal = std::move(w);
  f.dirichlet_safe = safe;
  // callbacks only valid at mesh nodes; flow uses the perturbation family
  (void)mesh;
  return f;
}

DisplacementField VelocityField::interpolate(const Mesh& mesh) const {
  if (nodal) return *nodal;
  DisplacementField vh;
  vh.degree = mesh.degree;
  vh.coeffs = VecX::Zero(3 * mesh.n_nodes());
  for (int i = 0; i < mesh.n_vertices; ++i) vh.set_node(i, eval(mesh.nodes[i]));
  if (mesh.degree == 2) {
    // mid-edge nodes move with the endpoint average (straight-sided mesh
    // motion), so the assembled interpolant is the piecewise linear one
    const int E[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {2, 3}, {1, 3}};
    for (const auto& cl : mesh.cells)
      for (int e = 0; e < 6; ++e)
        vh.set_node(cl[4 + e],
                    0.5 * (vh.at_node(cl[E[e][0]]) + vh.at_node(cl[E[e][1]])));
  }
  return vh;
}

Vec3 VelocityField::fe_value(const Mesh& mesh, const DisplacementField& vh, int c,
                             const Vec3& xi) const {
  return eval_field(mesh, vh, c, xi);
}

Mat3 VelocityField::fe_grad(const Mesh& mesh, const DisplacementField& vh, int c,
                            const Vec3& xi) const {
  return eval_grad(mesh, vh, c, xi);
}

void VelocityField::check_dirichlet_safe(const Mesh& mesh) const {
  if (!dirichlet_safe) return;
  for (int nd : mesh.boundary_nodes(BoundaryRole::DIRICHLET)) {
    Vec3 v = nodal ? nodal->at_node(nd) : eval(mesh.nodes[nd]);
    if (v.norm() > 1e-12)
      throw NumericError("velocity field marked dirichlet_safe but nonzero on Gamma_D");
  }
}

Transport flow_map(const VelocityField& V, double t, const std::vector<Vec3>& points,
                   const std::vector<Vec3>& normals, double h_max, MapFamily family) {
  Transport tr;
  tr.t = t;
  size_t n = points.size();
  tr.mapped.resize(n);
  tr.jacobian.resize(n);
  tr.gamma.resize(n);
  tr.omega.assign(n, 1.0);
  tr.normal_t.assign(n, Vec3::Zero());

  if (family == MapFamily::PERTURBATION) {
    for (size_t i = 0; i < n; ++i) {
      tr.mapped[i] = points[i] + t * V.eval(points[i]);
      tr.jacobian[i] = Mat3::Identity() + t * V.grad(points[i]);
    }
  } else {
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / h_max)));
    double h = t / steps;
    for (size_t i = 0; i < n; ++i) {
      Vec3 y = points[i];
      Mat3 J = Mat3::Identity();
      for (int s = 0; s < steps; ++s) {
        // RK4 on the coupled point/Jacobian system
        Vec3 k1 = V.eval(y);
        Mat3 K1 = V.grad(y) * J;
        Vec3 y2 = y + 0.5 * h * k1;
        Vec3 k2 = V.eval(y2);
        Mat3 K2 = V.grad(y2) * (J + 0.5 * h * K1);
        Vec3 y3 = y + 0.5 * h * k2;
        Vec3 k3 = V.eval(y3);
        Mat3 K3 = V.grad(y3) * (J + 0.5 * h * K2);
        Vec3 y4 = y + h * k3;
        Vec3 k4 = V.eval(y4);
        Mat3 K4 = V.grad(y4) * (J + h * K3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        J += h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
      }
      tr.mapped[i] = y;
      tr.jacobian[i] = J;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    tr.gamma[i] = tr.jacobian[i].determinant();
    if (tr.gamma[i] <= 0.0) throw NumericError("flow inverted the Jacobian (gamma <= 0)");
  }
  for (size_t i = 0; i < n && i < normals.size(); ++i) {
    if (normals[i].squaredNorm() == 0) continue;
    Vec3 w = tr.gamma[i] * tr.jacobian[i].inverse().transpose() * normals[i];
    tr.omega[i] = w.norm();
    tr.normal_t[i] = w.normalized();
  }
  return tr;
}

Mesh flow_mesh(const Mesh& mesh, const VelocityField& V, double t, double h_max,
               MapFamily family) {
  std::vector<Vec3> corners(mesh.nodes.begin(), mesh.nodes.begin() + mesh.n_vertices);
  Transport tr = flow_map(V, t, corners, {}, h_max, family);
  std::vector<Vec3> disp(mesh.n_vertices);
  for (int i = 0; i < mesh.n_vertices; ++i) disp[i] = tr.mapped[i] - corners[i];
  return deform(mesh, disp, 1.0);
}

double surface_divergence(const VelocityField& V, const Vec3& x, const Vec3& n) {
  Mat3 dv = V.grad(x);
  return dv.trace() - n.dot(dv * n);
}

}  // namespace shapeopt
