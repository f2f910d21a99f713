#include "shapeopt/material_derivative.hpp"

namespace shapeopt {

LoadSpec LoadSpec::constant(const Vec3& f_const, const Vec3& g_const, int g_tag) {
  LoadSpec s;
  if (f_const.squaredNorm() > 0) s.f = [f_const](const Vec3&) { return f_const; };
  s.g = [g_const, g_tag](const Vec3&, int tag) {
    return (g_tag < 0 || tag == g_tag) ? g_const : Vec3::Zero();
  };
  return s;
}

VecX assemble_ldot(const Mesh& mesh, const LoadSpec& loads, const VelocityField& V) {
  VecX r = VecX::Zero(3 * mesh.n_nodes());
  DisplacementField vh = V.interpolate(mesh);
  const int npc = mesh.nodes_per_cell();
  double N[10];
  Vec3 dN[10];
  if (loads.f) {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        tet_shape(mesh.degree, q.xi, N, dN);
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Vec3 vv = eval_field(mesh, vh, c, q.xi);
        Mat3 dv = eval_grad(mesh, vh, c, q.xi);
        Vec3 fV = loads.Df_at(x) * vv + loads.f_at(x) * dv.trace();
        double w = q.w * fr.detJ;
        for (int a = 0; a < npc; ++a)
          for (int i = 0; i < 3; ++i) r[3 * mesh.cells[c][a] + i] += w * N[a] * fV[i];
      }
    }
  }
  if (loads.g) {
    const auto& rule = tri_rule_deg4();
    const int npf = mesh.nodes_per_facet();
    double Ns[6];
    Vec3 dNs[6];
    for (const auto& fct : mesh.facets) {
      if (mesh.is_dirichlet_facet(fct)) continue;
      const Vec3& p0 = mesh.nodes[fct.nodes[0]];
      Vec3 e1 = mesh.nodes[fct.nodes[1]] - p0;
      Vec3 e2 = mesh.nodes[fct.nodes[2]] - p0;
      Vec3 nw = e1.cross(e2);
      double jac2 = nw.norm();
      Vec3 n = nw / jac2;
      // orient outward via the owner cell
      CellFrame fr = cell_frame(mesh, fct.cell);
      Vec3 cc = fr.x0 + fr.jac * Vec3(0.25, 0.25, 0.25);
      if (n.dot(p0 + (e1 + e2) / 3.0 - cc) < 0) n = -n;
      for (const auto& q : rule) {
        tri_shape(mesh.degree, q.xi[0], q.xi[1], Ns, dNs);
        Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
        Vec3 xi = fr.jac_inv * (x - fr.x0);
        Vec3 vv = eval_field(mesh, vh, fct.cell, xi);
        Mat3 dv = eval_grad(mesh, vh, fct.cell, xi);
        double div_g = dv.trace() - n.dot(dv * n);
        Vec3 gV = loads.Dg_at(x, fct.tag) * vv + loads.g_at(x, fct.tag) * div_g;
        double w = q.w * jac2;
        for (int a = 0; a < npf; ++a)
          for (int i = 0; i < 3; ++i) r[3 * fct.nodes[a] + i] += w * Ns[a] * gV[i];
      }
    }
  }
  return r;
}

VecX assemble_bdot_times_u(const Mesh& mesh, const MaterialParams& mat,
                           const DisplacementField& u, const VelocityField& V) {
  VecX r = VecX::Zero(3 * mesh.n_nodes());
  DisplacementField vh = V.interpolate(mesh);
  const int npc = mesh.nodes_per_cell();
  const auto& rule = tet_rule_deg2();
  double N[10];
  Vec3 dN[10];
  std::vector<Vec3> gx(npc);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame fr = cell_frame(mesh, c);
    for (const auto& q : rule) {
      tet_shape(mesh.degree, q.xi, N, dN);
      for (int a = 0; a < npc; ++a) gx[a] = fr.jac_inv.transpose() * dN[a];
      Mat3 du = eval_grad(mesh, u, c, q.xi);
      Mat3 dv = eval_grad(mesh, vh, c, q.xi);
      Mat3 sig = elastic_map(du, mat.lambda, mat.mu);
      Mat3 eps_dot_u = -sym(du * dv);
      // Bdot(u, e_i N_b) reduces to a matrix-vector product with grad N_b:
      //   tr(eps_dot(u) sigma(v)) -> elastic_map(eps_dot(u)) g_b
      //   tr(sigma(u) eps_dot(v)) -> -(sigma(u) dv^T) g_b
      //   div(V) tr(sigma(u) eps(v)) -> div(V) sigma(u) g_b
      Mat3 Aq = elastic_map(eps_dot_u, mat.lambda, mat.mu) - sig * dv.transpose() +
                dv.trace() * sig;
      double w = q.w * fr.detJ;
      for (int b = 0; b < npc; ++b) {
        Vec3 contrib = w * (Aq * gx[b]);
        for (int i = 0; i < 3; ++i) r[3 * mesh.cells[c][b] + i] += contrib[i];
      }
    }
  }
  return r;
}

SparseMat assemble_bdot_matrix(const Mesh& mesh, const MaterialParams& mat,
                               const VelocityField& V) {
  DisplacementField vh = V.interpolate(mesh);
  const int npc = mesh.nodes_per_cell();
  const auto& rule = tet_rule_deg2();
  double N[10];
  Vec3 dN[10];
  std::vector<Vec3> gx(npc);
  std::vector<Triplet> trips;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame fr = cell_frame(mesh, c);
    for (const auto& q : rule) {
      tet_shape(mesh.degree, q.xi, N, dN);
      for (int a = 0; a < npc; ++a) gx[a] = fr.jac_inv.transpose() * dN[a];
      Mat3 dv = eval_grad(mesh, vh, c, q.xi);
      double divv = dv.trace();
      double w = q.w * fr.detJ;
      // columns: trial dof (a, i); rows: test dof (b, j)
      for (int a = 0; a < npc; ++a)
        for (int i = 0; i < 3; ++i) {
          Mat3 du = Vec3::Unit(i) * gx[a].transpose();
          Mat3 sig = elastic_map(du, mat.lambda, mat.mu);
          Mat3 Aq = elastic_map(-sym(du * dv), mat.lambda, mat.mu) - sig * dv.transpose() +
                    divv * sig;
          for (int b = 0; b < npc; ++b) {
            Vec3 col = w * (Aq * gx[b]);
            for (int j = 0; j < 3; ++j)
              trips.emplace_back(3 * mesh.cells[c][b] + j, 3 * mesh.cells[c][a] + i, col[j]);
          }
        }
    }
  }
  SparseMat B(3 * mesh.n_nodes(), 3 * mesh.n_nodes());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

VecX material_derivative_rhs(const Mesh& mesh, const LinearSystem& sys,
                             const DisplacementField& u, const MaterialParams& mat,
                             const LoadSpec& loads, const VelocityField& V) {
  VecX r = assemble_ldot(mesh, loads, V) - assemble_bdot_times_u(mesh, mat, u, V);
  for (int nd : sys.dirichlet_nodes)
    for (int i = 0; i < 3; ++i) r[3 * nd + i] = 0.0;  // udot = 0 on Gamma_D
  return r;
}

DisplacementField solve_material_derivative(const Mesh& mesh, const LinearSystem& sys,
                                            const DisplacementField& u,
                                            const MaterialParams& mat, const LoadSpec& loads,
                                            const VelocityField& V, const SolveOptions& opts) {
  V.check_dirichlet_safe(mesh);
  VecX r = material_derivative_rhs(mesh, sys, u, mat, loads, V);
  return solve(mesh, sys, r, opts);
}

std::vector<Mat3> averaged_nodal_gradient(const Mesh& mesh, const DisplacementField& u) {
  std::vector<Mat3> g(mesh.n_nodes(), Mat3::Zero());
  std::vector<double> w(mesh.n_nodes(), 0.0);
  const int npc = mesh.nodes_per_cell();
  // sample the cell gradient at each node's reference position
  const Vec3 ref_nodes[10] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                              {0.5, 0, 0}, {0.5, 0.5, 0}, {0, 0.5, 0}, {0, 0, 0.5},
                              {0, 0.5, 0.5}, {0.5, 0, 0.5}};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double vol = mesh.cell_volume(c);
    for (int a = 0; a < npc; ++a) {
      int nd = mesh.cells[c][a];
      g[nd] += vol * eval_grad(mesh, u, c, ref_nodes[a]);
      w[nd] += vol;
    }
  }
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (w[i] > 0) g[i] /= w[i];
  return g;
}

DisplacementField local_shape_derivative(const Mesh& mesh, const DisplacementField& u,
                                         const DisplacementField& udot, const VelocityField& V) {
  DisplacementField vh = V.interpolate(mesh);
  auto grads = averaged_nodal_gradient(mesh, u);
  DisplacementField up;
  up.degree = mesh.degree;
  up.coeffs = VecX::Zero(3 * mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i)
    up.set_node(i, udot.at_node(i) - grads[i] * vh.at_node(i));
  return up;
}

}  // namespace shapeopt
