#include "shapeopt/descent.hpp"

#include <cmath>
#include <queue>
#include <set>

namespace shapeopt {

std::map<int, double> dirichlet_cutoff(const Mesh& mesh, const DescentConfig& cfg) {
  std::set<int> frozen_tags(cfg.frozen_tags.begin(), cfg.frozen_tags.end());
  std::map<int, std::set<int>> adj;
  std::set<int> seeds;
  for (const auto& f : mesh.facets) {
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        if (k != l) adj[f.nodes[k]].insert(f.nodes[l]);
    if (mesh.is_dirichlet_facet(f) || frozen_tags.count(f.tag))
      for (int k = 0; k < 3; ++k) seeds.insert(f.nodes[k]);
  }
  std::map<int, double> cut;
  if (cfg.cutoff_layers < 0) {
    for (const auto& [v, nb] : adj) cut[v] = 1.0;
    return cut;
  }
  std::map<int, int> dist;
  std::queue<int> bfs;
  for (int s : seeds) {
    dist[s] = 0;
    bfs.push(s);
  }
  int horizon = cfg.cutoff_layers + std::max(1, cfg.ramp_layers);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    if (dist[v] >= horizon) continue;
    for (int w : adj[v])
      if (!dist.count(w)) {
        dist[w] = dist[v] + 1;
        bfs.push(w);
      }
  }
  for (const auto& [v, nb] : adj) {
    auto it = dist.find(v);
    if (it == dist.end()) {
      cut[v] = 1.0;
      continue;
    }
    int d = it->second;
    if (d <= cfg.cutoff_layers)
      cut[v] = 0.0;
    else if (d >= horizon)
      cut[v] = 1.0;
    else {
      double s = static_cast<double>(d - cfg.cutoff_layers) / std::max(1, cfg.ramp_layers);
      cut[v] = s * s * (3.0 - 2.0 * s);  // smoothstep
    }
  }
  return cut;
}

std::map<int, Vec3> l2_direction(const Mesh& mesh, const ShapeGradientDensity& G,
                                 const SurfaceGeometry& geom, const DescentConfig& cfg) {
  auto cut = dirichlet_cutoff(mesh, cfg);
  std::map<int, Vec3> W;
  for (const auto& [v, g] : G.values) W[v] = -cut.at(v) * g * geom.normal_at(v);
  return W;
}

std::map<int, Vec3> helmholtz_direction(const Mesh& mesh, const ShapeGradientDensity& G,
                                        const SurfaceGeometry& geom, const SurfaceOperator& ops,
                                        double c, const DescentConfig& cfg) {
  if (c < 0) throw ConfigError("helmholtz smoothing needs c >= 0");
  auto cut = dirichlet_cutoff(mesh, cfg);
  int n = ops.n();
  SparseMat M(n, n);
  std::vector<Triplet> mt;
  mt.reserve(n);
  for (int i = 0; i < n; ++i) mt.emplace_back(i, i, ops.lumped_mass[i]);
  M.setFromTriplets(mt.begin(), mt.end());
  SparseMat A = M + c * ops.stiffness;
  std::map<int, Vec3> W;
  for (int i = 0; i < n; ++i) W[ops.vertices[i]] = Vec3::Zero();
  for (int comp = 0; comp < 3; ++comp) {
    VecX rhs = VecX::Zero(n);
    for (int i = 0; i < n; ++i) {
      int v = ops.vertices[i];
      auto it = G.values.find(v);
      double g = (it != G.values.end()) ? it->second : 0.0;
      rhs[i] = ops.lumped_mass[i] * g * geom.normal_at(v)[comp];
    }
    VecX w = cg_solve(A, rhs, nullptr, 1e-13, 50000, "helmholtz smoothing");
    for (int i = 0; i < n; ++i) W[ops.vertices[i]][comp] = -w[i];
  }
  for (auto& [v, w] : W) w *= cut.at(v);
  return W;
}

VecX distributed_dj_functional(const Mesh& mesh, const DisplacementField& u,
                               const DisplacementField& p, const MaterialParams& mat,
                               const LoadSpec& loads, const LocalDensity& density) {
  const int ndof = 3 * mesh.n_nodes();
  VecX out = VecX::Zero(ndof);
  const int npc = mesh.nodes_per_cell();
  double N[10];
  Vec3 dN[10];

  // explicit density terms: div(V) F + <dF/dx, V> - M : (Du DV)^sigma
  if (density.kind() == FunctionalKind::VOLUME) {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        tet_shape(mesh.degree, q.xi, N, dN);
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Vec3 uu = eval_field(mesh, u, c, q.xi);
        Mat3 du = eval_grad(mesh, u, c, q.xi);
        Mat3 sig = elastic_map(du, mat.lambda, mat.mu);
        double F = density.value(x, uu, sig);
        Vec3 d1 = density.d_x(x, uu, sig);
        Mat3 M3 = density.d_sigma(x, uu, sig);
        double w = q.w * fr.detJ;
        for (int a = 0; a < npc; ++a) {
          Vec3 g = fr.jac_inv.transpose() * dN[a];
          for (int i = 0; i < 3; ++i) {
            Mat3 dudv = du * (Vec3::Unit(i) * g.transpose());
            double val = g[i] * F + N[a] * d1[i] -
                         ddot(M3, elastic_map(dudv, mat.lambda, mat.mu));
            out[3 * mesh.cells[c][a] + i] += w * val;
          }
        }
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
        tet_shape(mesh.degree, xi, N, dN);
        Vec3 uu = eval_field(mesh, u, f.cell, xi);
        Mat3 du = eval_grad(mesh, u, f.cell, xi);
        Mat3 sig = elastic_map(du, mat.lambda, mat.mu);
        double F = density.value(x, uu, sig);
        Vec3 d1 = density.d_x(x, uu, sig);
        Mat3 M3 = density.d_sigma(x, uu, sig);
        double w = q.w * jac2;
        for (int a = 0; a < npc; ++a) {
          Vec3 g = fr.jac_inv.transpose() * dN[a];
          for (int i = 0; i < 3; ++i) {
            double divg = g[i] - n[i] * g.dot(n);
            Mat3 dudv = du * (Vec3::Unit(i) * g.transpose());
            double val = divg * F + N[a] * d1[i] -
                         ddot(M3, elastic_map(dudv, mat.lambda, mat.mu));
            out[3 * mesh.cells[f.cell][a] + i] += w * val;
          }
        }
      }
    }
  }

  // Ldot(p) - Bdot(u, p) as a functional of the nodal velocity
  {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        tet_shape(mesh.degree, q.xi, N, dN);
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Vec3 pp = eval_field(mesh, p, c, q.xi);
        Mat3 dp = eval_grad(mesh, p, c, q.xi);
        Mat3 du = eval_grad(mesh, u, c, q.xi);
        Mat3 sig_u = elastic_map(du, mat.lambda, mat.mu);
        Mat3 sig_p = elastic_map(dp, mat.lambda, mat.mu);
        double energy = ddot(sig_u, sym(dp));
        Vec3 fx = loads.f_at(x);
        Mat3 dfx = loads.Df_at(x);
        double w = q.w * fr.detJ;
        for (int a = 0; a < npc; ++a) {
          Vec3 g = fr.jac_inv.transpose() * dN[a];
          // -Bdot terms: + Du^T sig(p) g + Dp^T sig(u) g - (sig_u : eps(p)) g
          Vec3 mb = du.transpose() * (sig_p * g) + dp.transpose() * (sig_u * g) - energy * g;
          for (int i = 0; i < 3; ++i) {
            double val = N[a] * (dfx * Vec3::Unit(i)).dot(pp) + fx.dot(pp) * g[i] + mb[i];
            out[3 * mesh.cells[c][a] + i] += w * val;
          }
        }
      }
    }
    const auto& rule_s = tri_rule_deg4();
    for (const auto& f : mesh.facets) {
      if (mesh.is_dirichlet_facet(f)) continue;
      const Vec3& p0 = mesh.nodes[f.nodes[0]];
      Vec3 e1 = mesh.nodes[f.nodes[1]] - p0;
      Vec3 e2 = mesh.nodes[f.nodes[2]] - p0;
      Vec3 nw = e1.cross(e2);
      double jac2 = nw.norm();
      Vec3 n = nw / jac2;
      CellFrame fr = cell_frame(mesh, f.cell);
      Vec3 cc = fr.x0 + fr.jac * Vec3(0.25, 0.25, 0.25);
      if (n.dot(p0 + (e1 + e2) / 3.0 - cc) < 0) n = -n;
      for (const auto& q : rule_s) {
        Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
        Vec3 xi = fr.jac_inv * (x - fr.x0);
        tet_shape(mesh.degree, xi, N, dN);
        Vec3 pp = eval_field(mesh, p, f.cell, xi);
        Vec3 gx_load = loads.g_at(x, f.tag);
        Mat3 dgx = loads.Dg_at(x, f.tag);
        double w = q.w * jac2;
        for (int a = 0; a < npc; ++a) {
          Vec3 g = fr.jac_inv.transpose() * dN[a];
          for (int i = 0; i < 3; ++i) {
            double divg = g[i] - n[i] * g.dot(n);
            double val = N[a] * (dgx * Vec3::Unit(i)).dot(pp) + gx_load.dot(pp) * divg;
            out[3 * mesh.cells[f.cell][a] + i] += w * val;
          }
        }
      }
    }
  }
  return out;
}

DisplacementField volume_extension_direction(const Mesh& mesh, const VecX& dj_functional,
                                             const DescentConfig& cfg, const SolveOptions& opts) {
  (void)cfg;
  // stiffness of int eps(W):eps(V) dx is elasticity with lambda = 0, 2mu = 1
  MaterialParams strain_only;
  strain_only.lambda = 0.0;
  strain_only.mu = 0.5;
  LinearSystem sys = assemble_elasticity(mesh, strain_only);
  VecX rhs = -dj_functional;
  apply_dirichlet(mesh, sys, rhs, nullptr);
  return solve(mesh, sys, rhs, opts);
}

std::vector<Vec3> extend_to_volume(const Mesh& mesh, const MaterialParams& mat,
                                   const std::map<int, Vec3>& boundary_field,
                                   const SolveOptions& opts) {
  LinearSystem sys = assemble_elasticity(mesh, mat);
  sys.dirichlet_nodes = mesh.boundary_nodes();
  std::map<int, Vec3> data = boundary_field;
  if (mesh.degree == 2) {
    for (const auto& f : mesh.facets) {
      auto mid = [&](int a, int b, int m) {
        if (!data.count(m)) {
          Vec3 va = data.count(a) ? data.at(a) : Vec3::Zero();
          Vec3 vb = data.count(b) ? data.at(b) : Vec3::Zero();
          data[m] = 0.5 * (va + vb);
        }
      };
      mid(f.nodes[0], f.nodes[1], f.nodes[3]);
      mid(f.nodes[1], f.nodes[2], f.nodes[4]);
      mid(f.nodes[2], f.nodes[0], f.nodes[5]);
    }
  }
  VecX rhs = VecX::Zero(sys.n_dof);
  apply_dirichlet_nodal(sys, rhs, data);
  DisplacementField w = solve(mesh, sys, rhs, opts);
  std::vector<Vec3> out(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) out[i] = w.at_node(i);
  return out;
}

double surface_h1_seminorm(const SurfaceOperator& ops, const std::map<int, Vec3>& w) {
  double acc = 0.0;
  for (size_t ti = 0; ti < ops.tris.size(); ++ti) {
    Mat3 j = ops.tri_jacobian(w, static_cast<int>(ti));
    acc += ops.tri_area[ti] * j.squaredNorm();
  }
  return std::sqrt(acc);
}

double mean_edge_length(const Mesh& mesh) {
  double acc = 0.0;
  long n = 0;
  const int E[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {2, 3}, {1, 3}};
  for (const auto& cl : mesh.cells)
    for (const auto& e : E) {
      acc += (mesh.nodes[cl[e[0]]] - mesh.nodes[cl[e[1]]]).norm();
      ++n;
    }
  return acc / n;
}

}  // namespace shapeopt
