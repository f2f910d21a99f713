#include "shapeopt/adjoint.hpp"

#include <cmath>
#include <set>

namespace shapeopt {

namespace {

// Tangential gradients of the facet shape functions in 3D.
void facet_tangential_gradients(const Mesh& mesh, const Facet& f, const Vec3& xi, int npf,
                                Vec3* grad) {
  double Ns[6];
  Vec3 dNs[6];
  tri_shape(mesh.degree, xi[0], xi[1], Ns, dNs);
  const Vec3& p0 = mesh.nodes[f.nodes[0]];
  Vec3 e1 = mesh.nodes[f.nodes[1]] - p0;
  Vec3 e2 = mesh.nodes[f.nodes[2]] - p0;
  Eigen::Matrix2d G;
  G << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
  Eigen::Matrix2d Gi = G.inverse();
  for (int a = 0; a < npf; ++a) {
    Eigen::Vector2d d(dNs[a][0], dNs[a][1]);
    Eigen::Vector2d ab = Gi * d;
    grad[a] = ab[0] * e1 + ab[1] * e2;
  }
}

Mat3 vertex_M(const LocalDensity& density, const Vec3& x, const Vec3& u, const Mat3& sigma) {
  return density.d_sigma(x, u, sigma);
}

}  // namespace

namespace {

// Vertex field h of the strong-form surface adjoint right-hand side.
std::map<int, Vec3> strong_h_vertex_field(const Mesh& mesh, const DisplacementField& u,
                                          const MaterialParams& mat, const LocalDensity& density,
                                          const SurfaceGeometry& geom, const SurfaceOperator& ops,
                                          const BoundaryStress& bstress) {
  const double lam_t = mat.lambda - mat.lambda * mat.lambda / (mat.lambda + 2.0 * mat.mu);
  std::map<int, double> trMg;
  std::map<int, Vec3> col[3];  // columns of [M + M^T]_Gamma as vertex vector fields
  std::map<int, Mat3> Mv;
  for (const auto& [v, sv] : bstress.sigma) {
    const Vec3& n = geom.normal_at(v);
    Mat3 I_gamma = Mat3::Identity() - n * n.transpose();
    Mat3 M = vertex_M(density, mesh.nodes[v], u.at_node(v), sv);
    Mv[v] = M;
    trMg[v] = (M * I_gamma).trace();
    Mat3 A = (M + M.transpose()) * I_gamma;
    for (int k = 0; k < 3; ++k) col[k][v] = A.col(k);
  }
  auto grad_trMg = ops.vertex_gradient(trMg);
  // div_Gamma of the matrix field column-wise
  std::map<int, Vec3> divA;
  {
    std::map<int, Mat3> jac[3];
    for (int k = 0; k < 3; ++k) jac[k] = ops.vertex_jacobian(col[k]);
    for (const auto& [v, g] : jac[0]) {
      Vec3 d;
      for (int k = 0; k < 3; ++k) d[k] = jac[k].at(v).trace();
      divA[v] = d;
    }
  }
  std::map<int, Vec3> h;
  for (const auto& [v, sv] : bstress.sigma) {
    const Vec3& n = geom.normal_at(v);
    double kappa = geom.kappa_at(v);
    Mat3 I_gamma = Mat3::Identity() - n * n.transpose();
    const Mat3& M = Mv[v];
    Vec3 d2 = density.d_u(mesh.nodes[v], u.at_node(v), sv);
    Vec3 hv = d2 +
              kappa * ((lam_t * trMg[v]) * n + mat.mu * (I_gamma * (M + M.transpose()) * n)) -
              lam_t * grad_trMg[v] - mat.mu * divA[v];
    h[v] = hv;
  }
  return h;
}


}  // namespace

VecX assemble_adjoint_rhs(const Mesh& mesh, const DisplacementField& u,
                          const MaterialParams& mat, const AdjointSpec& spec,
                          const SurfaceGeometry* geom, const SurfaceOperator* ops,
                          const BoundaryStress* bstress) {
  const LocalDensity& density = *spec.density;
  VecX r = VecX::Zero(3 * mesh.n_nodes());
  const int npc = mesh.nodes_per_cell();
  double N[10];
  Vec3 dN[10];
  std::vector<Vec3> gx(npc);

  if (density.kind() == FunctionalKind::VOLUME) {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        tet_shape(mesh.degree, q.xi, N, dN);
        for (int a = 0; a < npc; ++a) gx[a] = fr.jac_inv.transpose() * dN[a];
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Vec3 uu = eval_field(mesh, u, c, q.xi);
        Mat3 sig = elastic_map(eval_grad(mesh, u, c, q.xi), mat.lambda, mat.mu);
        Vec3 d2 = density.d_u(x, uu, sig);
        Mat3 Msig = elastic_map(sym(density.d_sigma(x, uu, sig)), mat.lambda, mat.mu);
        double w = q.w * fr.detJ;
        for (int a = 0; a < npc; ++a) {
          Vec3 contrib = w * (N[a] * d2 + Msig * gx[a]);
          for (int i = 0; i < 3; ++i) r[3 * mesh.cells[c][a] + i] += contrib[i];
        }
      }
    }
    return r;
  }

  const auto& rule = tri_rule_deg4();
  const int npf = mesh.nodes_per_facet();
  double Ns[6];
  Vec3 dNs[6];
  Vec3 tg[6];
  const double lam_t = mat.lambda - mat.lambda * mat.lambda / (mat.lambda + 2.0 * mat.mu);

  std::map<int, Vec3> strong_h;
  if (spec.mode == AdjointRhsMode::STRONG_H &&
      density.kind() == FunctionalKind::SURFACE_SIGMA) {
    if (!geom || !ops || !bstress)
      throw ConfigError("strong adjoint assembly needs surface operators");
    strong_h = strong_h_vertex_field(mesh, u, mat, density, *geom, *ops, *bstress);
  }

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
    Mat3 I_gamma = Mat3::Identity() - n * n.transpose();

    for (const auto& q : rule) {
      tri_shape(mesh.degree, q.xi[0], q.xi[1], Ns, dNs);
      Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
      Vec3 xi = fr.jac_inv * (x - fr.x0);
      Vec3 uu = eval_field(mesh, u, f.cell, xi);
      double w = q.w * jac2;

      if (density.kind() == FunctionalKind::SURFACE_U) {
        Mat3 sig = elastic_map(eval_grad(mesh, u, f.cell, xi), mat.lambda, mat.mu);
        Vec3 d2 = density.d_u(x, uu, sig);
        for (int a = 0; a < npf; ++a)
          for (int i = 0; i < 3; ++i) r[3 * f.nodes[a] + i] += w * Ns[a] * d2[i];
        continue;
      }

      // SURFACE_SIGMA
      if (spec.mode == AdjointRhsMode::DIRECT) {
        Mat3 sig = elastic_map(eval_grad(mesh, u, f.cell, xi), mat.lambda, mat.mu);
        Vec3 d2 = density.d_u(x, uu, sig);
        Mat3 Msig = elastic_map(sym(density.d_sigma(x, uu, sig)), mat.lambda, mat.mu);
        for (int a = 0; a < npf; ++a)
          for (int i = 0; i < 3; ++i) r[3 * f.nodes[a] + i] += w * Ns[a] * d2[i];
        // M : sigma(test) needs the volume gradients of the owner cell
        tet_shape(mesh.degree, xi, N, dN);
        for (int a = 0; a < npc; ++a) {
          Vec3 g = fr.jac_inv.transpose() * dN[a];
          Vec3 contrib = w * (Msig * g);
          for (int i = 0; i < 3; ++i) r[3 * mesh.cells[f.cell][a] + i] += contrib[i];
        }
      } else if (spec.mode == AdjointRhsMode::STRONG_H) {
        double l0 = 1.0 - q.xi[0] - q.xi[1];
        double lam3[3] = {l0, q.xi[0], q.xi[1]};
        Vec3 hq = Vec3::Zero();
        for (int k = 0; k < 3; ++k) hq += lam3[k] * strong_h.at(f.nodes[k]);
        for (int a = 0; a < npf; ++a)
          for (int i = 0; i < 3; ++i) r[3 * f.nodes[a] + i] += w * Ns[a] * hq[i];
      } else if (spec.mode == AdjointRhsMode::WEAK_STOKES) {
        if (!bstress) throw ConfigError("weak adjoint assembly needs boundary stress");
        // M interpolated P1 from the vertex fields
        Mat3 M = Mat3::Zero();
        Vec3 d2 = Vec3::Zero();
        double l0 = 1.0 - q.xi[0] - q.xi[1];
        double lam3[3] = {l0, q.xi[0], q.xi[1]};
        for (int k = 0; k < 3; ++k) {
          int v = f.nodes[k];
          const Mat3& sv = bstress->sigma.at(v);
          M += lam3[k] * vertex_M(density, mesh.nodes[v], u.at_node(v), sv);
          d2 += lam3[k] * density.d_u(mesh.nodes[v], u.at_node(v), sv);
        }
        Mat3 MpMt_g = (M + M.transpose()) * I_gamma;
        double trMg = (M * I_gamma).trace();
        facet_tangential_gradients(mesh, f, q.xi, npf, tg);
        for (int a = 0; a < npf; ++a) {
          Vec3 contrib = w * (Ns[a] * d2 + lam_t * trMg * tg[a] +
                              mat.mu * (I_gamma * (M + M.transpose()) * tg[a]));
          for (int i = 0; i < 3; ++i) r[3 * f.nodes[a] + i] += contrib[i];
        }
      }
    }
  }
  return r;
}


DisplacementField solve_adjoint(const Mesh& mesh, const LinearSystem& sys,
                                const DisplacementField& u, const MaterialParams& mat,
                                const AdjointSpec& spec, const SurfaceGeometry* geom,
                                const SurfaceOperator* ops, const BoundaryStress* bstress,
                                const SolveOptions& opts) {
  VecX r = assemble_adjoint_rhs(mesh, u, mat, spec, geom, ops, bstress);
  for (int nd : sys.dirichlet_nodes)
    for (int i = 0; i < 3; ++i) r[3 * nd + i] = 0.0;
  return solve(mesh, sys, r, opts);
}

ShapeGradientDensity hadamard_density(const Mesh& mesh, const DisplacementField& u,
                                      const DisplacementField& p, const MaterialParams& mat,
                                      const LoadSpec& loads, const AdjointSpec& spec,
                                      const SurfaceGeometry& geom, const SurfaceOperator& ops,
                                      const BoundaryStress& bstress) {
  const LocalDensity& density = *spec.density;
  ShapeGradientDensity G;
  if (geom.mean_curvature.empty()) throw ConfigError("hadamard density needs curvature");

  // vertex traction: area-weighted over adjacent Neumann facets
  std::map<int, Vec3> g_vertex;
  std::map<int, Mat3> Dg_vertex;
  std::map<int, double> g_weight;
  for (size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const Facet& f = mesh.facets[fi];
    if (mesh.is_dirichlet_facet(f)) continue;
    double area = mesh.facet_area(static_cast<int>(fi));
    for (int k = 0; k < 3; ++k) {
      int v = f.nodes[k];
      zsum(g_vertex, v) += area * loads.g_at(mesh.nodes[v], f.tag);
      zsum(Dg_vertex, v) += area * loads.Dg_at(mesh.nodes[v], f.tag);
      g_weight[v] += area;
    }
  }

  std::set<int> dirichlet_verts;
  for (const auto& f : mesh.facets)
    if (mesh.is_dirichlet_facet(f))
      for (int k = 0; k < 3; ++k) dirichlet_verts.insert(f.nodes[k]);

  auto nodal_grads = averaged_nodal_gradient(mesh, u);

  // vertex values of p and the combined field for the sigma-driven case
  std::map<int, Vec3> w_field;
  const double lam_ratio = mat.lambda / (mat.lambda + 2.0 * mat.mu);
  for (const auto& [v, sv] : bstress.sigma) {
    Vec3 w = p.at_node(v);
    if (density.kind() == FunctionalKind::SURFACE_SIGMA) {
      const Vec3& n = geom.normal_at(v);
      Mat3 I_gamma = Mat3::Identity() - n * n.transpose();
      Mat3 M = vertex_M(density, mesh.nodes[v], u.at_node(v), sv);
      Mat3 Xi = lam_ratio * (I_gamma * M).trace() * Mat3::Identity() + I_gamma * M +
                M.transpose();
      w += Xi * n;
    }
    w_field[v] = w;
  }
  auto Dw = ops.vertex_jacobian(w_field);

  for (const auto& [v, sv] : bstress.sigma) {
    if (dirichlet_verts.count(v)) {
      G.values[v] = 0.0;
      continue;
    }
    const Vec3& n = geom.normal_at(v);
    double kappa = geom.kappa_at(v);
    const Vec3& x = mesh.nodes[v];
    Vec3 uu = u.at_node(v);
    Mat3 I_gamma = Mat3::Identity() - n * n.transpose();
    Mat3 sigma_g = sv * I_gamma;

    Vec3 gv = Vec3::Zero();
    Mat3 dgv = Mat3::Zero();
    if (g_weight.count(v) && g_weight[v] > 0) {
      gv = g_vertex[v] / g_weight[v];
      dgv = Dg_vertex[v] / g_weight[v];
    }
    Vec3 fk = loads.f_at(x) + kappa * gv + dgv * n;

    double val = 0.0;
    switch (density.kind()) {
      case FunctionalKind::VOLUME: {
        val = density.value(x, uu, sv) + fk.dot(w_field[v]) - ddot(Dw[v], sigma_g);
        break;
      }
      case FunctionalKind::SURFACE_U: {
        val = fk.dot(w_field[v]) - ddot(Dw[v], sigma_g) +
              density.d_u(x, uu, sv).dot(nodal_grads[v] * n) +
              density.d_x(x, uu, sv).dot(n) + kappa * density.value(x, uu, sv);
        break;
      }
      case FunctionalKind::SURFACE_SIGMA: {
        Mat3 M = vertex_M(density, x, uu, sv);
        val = density.d_x(x, uu, sv).dot(n) + kappa * density.value(x, uu, sv) +
              density.d_u(x, uu, sv).dot(nodal_grads[v] * n) + ddot(M, bstress.dsigma_dn.at(v)) +
              fk.dot(w_field[v]) - ddot(sigma_g, Dw[v]);
        break;
      }
    }
    G.values[v] = val;
  }
  return G;
}

double distributed_shape_derivative(const Mesh& mesh, const DisplacementField& u,
                                    const DisplacementField& p, const MaterialParams& mat,
                                    const LoadSpec& loads, const LocalDensity& density,
                                    const VelocityField& V) {
  DisplacementField vh = V.interpolate(mesh);
  double dj = 0.0;
  // explicit V terms of the cost density
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
        double w = q.w * fr.detJ;
        dj += w * (dv.trace() * density.value(x, uu, sig) + density.d_x(x, uu, sig).dot(vv) -
                   ddot(density.d_sigma(x, uu, sig), elastic_map(du * dv, mat.lambda, mat.mu)));
      }
    }
  } else {
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
        double w = q.w * jac2;
        dj += w * (div_g * density.value(x, uu, sig) + density.d_x(x, uu, sig).dot(vv) -
                   ddot(density.d_sigma(x, uu, sig), elastic_map(du * dv, mat.lambda, mat.mu)));
      }
    }
  }
  // adjoint pairing replaces the udot terms
  VecX ldot = assemble_ldot(mesh, loads, V);
  VecX bdot_u = assemble_bdot_times_u(mesh, mat, u, V);
  dj += p.coeffs.dot(ldot - bdot_u);
  return dj;
}

double dj_from_gradient(const Mesh& mesh, const SurfaceGeometry& geom,
                        const ShapeGradientDensity& G, const VelocityField& V) {
  double dj = 0.0;
  for (size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const Facet& f = mesh.facets[fi];
    if (mesh.is_dirichlet_facet(f)) continue;
    double area = mesh.facet_area(static_cast<int>(fi));
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      int v = f.nodes[k];
      auto it = G.values.find(v);
      if (it == G.values.end()) continue;
      Vec3 vv = V.nodal ? V.nodal->at_node(v) : V.eval(mesh.nodes[v]);
      acc += it->second * vv.dot(geom.normal_at(v));
    }
    dj += area * acc / 3.0;
  }
  return dj;
}

}  // namespace shapeopt
