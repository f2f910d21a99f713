#include "shapeopt/fem.hpp"

#include <cmath>
#include <iostream>
#include <set>

namespace shapeopt {

MaterialParams MaterialParams::from_E_nu(double E, double nu) {
  MaterialParams m;
  m.E = E;
  m.nu = nu;
  m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  m.mu = E / (2.0 * (1.0 + nu));
  return m;
}

void MaterialParams::check() const {
  if (lambda <= 0 || mu <= 0) throw ConfigError("Lame coefficients must be positive");
  if (b >= 0 || c >= 0) throw ConfigError("CMB exponents b, c must be negative");
  if (m <= 0) throw ConfigError("Weibull shape m must be positive");
  if (n_hat <= 0 || n_hat >= 1) throw ConfigError("hardening exponent must lie in (0,1)");
  if (E > 0 && nu > 0) {
    double l = E * nu / ((1 + nu) * (1 - 2 * nu)), g = E / (2 * (1 + nu));
    if (std::abs(l - lambda) > 1e-8 * l || std::abs(g - mu) > 1e-8 * g)
      throw ConfigError("lambda/mu inconsistent with E, nu");
  }
}

void tet_shape(int degree, const Vec3& xi, double* N, Vec3* dN) {
  double x = xi[0], y = xi[1], z = xi[2];
  double l0 = 1.0 - x - y - z, l1 = x, l2 = y, l3 = z;
  Vec3 g0(-1, -1, -1), g1(1, 0, 0), g2(0, 1, 0), g3(0, 0, 1);
  if (degree == 1) {
    N[0] = l0; N[1] = l1; N[2] = l2; N[3] = l3;
    dN[0] = g0; dN[1] = g1; dN[2] = g2; dN[3] = g3;
    return;
  }
  const double L[4] = {l0, l1, l2, l3};
  const Vec3 G[4] = {g0, g1, g2, g3};
  for (int i = 0; i < 4; ++i) {
    N[i] = L[i] * (2.0 * L[i] - 1.0);
    dN[i] = (4.0 * L[i] - 1.0) * G[i];
  }
  // mid-edge nodes in the cell edge order (01,12,02,03,23,13)
  const int E[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {2, 3}, {1, 3}};
  for (int e = 0; e < 6; ++e) {
    int a = E[e][0], b = E[e][1];
    N[4 + e] = 4.0 * L[a] * L[b];
    dN[4 + e] = 4.0 * (L[a] * G[b] + L[b] * G[a]);
  }
}

void tri_shape(int degree, double xi, double eta, double* N, Vec3* dN2) {
  double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  Vec3 g0(-1, -1, 0), g1(1, 0, 0), g2(0, 1, 0);
  if (degree == 1) {
    N[0] = l0; N[1] = l1; N[2] = l2;
    dN2[0] = g0; dN2[1] = g1; dN2[2] = g2;
    return;
  }
  const double L[3] = {l0, l1, l2};
  const Vec3 G[3] = {g0, g1, g2};
  for (int i = 0; i < 3; ++i) {
    N[i] = L[i] * (2.0 * L[i] - 1.0);
    dN2[i] = (4.0 * L[i] - 1.0) * G[i];
  }
  const int E[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int e = 0; e < 3; ++e) {
    int a = E[e][0], b = E[e][1];
    N[3 + e] = 4.0 * L[a] * L[b];
    dN2[3 + e] = 4.0 * (L[a] * G[b] + L[b] * G[a]);
  }
}

CellFrame cell_frame(const Mesh& mesh, int c) {
  CellFrame fr;
  const auto& cl = mesh.cells[c];
  fr.x0 = mesh.nodes[cl[0]];
  fr.jac.col(0) = mesh.nodes[cl[1]] - fr.x0;
  fr.jac.col(1) = mesh.nodes[cl[2]] - fr.x0;
  fr.jac.col(2) = mesh.nodes[cl[3]] - fr.x0;
  fr.detJ = fr.jac.determinant();
  if (fr.detJ <= 0) throw MeshError("cell " + std::to_string(c) + " has non-positive volume");
  fr.jac_inv = fr.jac.inverse();
  return fr;
}

Vec3 eval_field(const Mesh& mesh, const DisplacementField& u, int c, const Vec3& xi) {
  double N[10];
  Vec3 dN[10];
  tet_shape(mesh.degree, xi, N, dN);
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < mesh.nodes_per_cell(); ++a) v += N[a] * u.at_node(mesh.cells[c][a]);
  return v;
}

Mat3 eval_grad(const Mesh& mesh, const DisplacementField& u, int c, const Vec3& xi) {
  double N[10];
  Vec3 dN[10];
  tet_shape(mesh.degree, xi, N, dN);
  CellFrame fr = cell_frame(mesh, c);
  Mat3 g = Mat3::Zero();
  for (int a = 0; a < mesh.nodes_per_cell(); ++a) {
    Vec3 gx = fr.jac_inv.transpose() * dN[a];
    g += u.at_node(mesh.cells[c][a]) * gx.transpose();
  }
  return g;
}

LinearSystem assemble_elasticity(const Mesh& mesh, const MaterialParams& mat) {
  LinearSystem sys;
  const int npc = mesh.nodes_per_cell();
  const int n = mesh.n_nodes();
  sys.n_dof = 3 * n;
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_cells() * npc * npc * 9);
  const auto& rule = tet_rule_deg2();
  double N[10];
  Vec3 dN[10];
  std::vector<Vec3> gx(npc);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame fr = cell_frame(mesh, c);
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(3 * npc, 3 * npc);
    for (const auto& q : rule) {
      tet_shape(mesh.degree, q.xi, N, dN);
      for (int a = 0; a < npc; ++a) gx[a] = fr.jac_inv.transpose() * dN[a];
      double w = q.w * fr.detJ;
      for (int a = 0; a < npc; ++a)
        for (int b = 0; b < npc; ++b) {
          // B(u,v) element block: lambda (g_a x g_b) + mu (g_b . g_a) I + mu g_b g_a^T
          double gdot = gx[a].dot(gx[b]);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              double v = mat.lambda * gx[a][i] * gx[b][j] + mat.mu * gx[b][i] * gx[a][j];
              if (i == j) v += mat.mu * gdot;
              ke(3 * a + i, 3 * b + j) += w * v;
            }
        }
    }
    for (int a = 0; a < npc; ++a)
      for (int b = 0; b < npc; ++b)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            trips.emplace_back(3 * mesh.cells[c][a] + i, 3 * mesh.cells[c][b] + j,
                               ke(3 * a + i, 3 * b + j));
  }
  sys.A_free.resize(sys.n_dof, sys.n_dof);
  sys.A_free.setFromTriplets(trips.begin(), trips.end());
  sys.A = sys.A_free;
  sys.dirichlet_nodes = mesh.boundary_nodes(BoundaryRole::DIRICHLET);
  sys.dirichlet_values = VecX::Zero(sys.n_dof);
  return sys;
}

VecX assemble_load(const Mesh& mesh, const VolumeLoad& f, const SurfaceLoad& g,
                   bool* warned_dirichlet_traction) {
  VecX rhs = VecX::Zero(3 * mesh.n_nodes());
  const int npc = mesh.nodes_per_cell();
  double N[10];
  Vec3 dN[10];
  if (f) {
    const auto& rule = tet_rule_deg2();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CellFrame fr = cell_frame(mesh, c);
      for (const auto& q : rule) {
        tet_shape(mesh.degree, q.xi, N, dN);
        Vec3 x = fr.x0 + fr.jac * q.xi;
        Vec3 fx = f(x);
        double w = q.w * fr.detJ;
        for (int a = 0; a < npc; ++a)
          for (int i = 0; i < 3; ++i) rhs[3 * mesh.cells[c][a] + i] += w * N[a] * fx[i];
      }
    }
  }
  if (g) {
    const int npf = mesh.nodes_per_facet();
    const auto& rule = tri_rule_deg4();
    bool warned = false;
    for (const auto& fct : mesh.facets) {
      if (mesh.is_dirichlet_facet(fct)) {
        // traction on a clamped facet has no effect; flag it once
        Vec3 probe = g(mesh.nodes[fct.nodes[0]], fct.tag);
        if (probe.squaredNorm() > 0 && !warned) {
          warned = true;
          if (warned_dirichlet_traction) *warned_dirichlet_traction = true;
          std::cerr << "warning: traction on Dirichlet facet ignored\n";
        }
        continue;
      }
      const Vec3& p0 = mesh.nodes[fct.nodes[0]];
      Vec3 e1 = mesh.nodes[fct.nodes[1]] - p0;
      Vec3 e2 = mesh.nodes[fct.nodes[2]] - p0;
      double jac2 = e1.cross(e2).norm();  // reference area 1/2 -> weight carries it
      double Ns[6];
      Vec3 dNs[6];
      for (const auto& q : rule) {
        tri_shape(mesh.degree, q.xi[0], q.xi[1], Ns, dNs);
        Vec3 x = p0 + q.xi[0] * e1 + q.xi[1] * e2;
        Vec3 gx = g(x, fct.tag);
        double w = q.w * jac2;
        for (int a = 0; a < npf; ++a)
          for (int i = 0; i < 3; ++i) rhs[3 * fct.nodes[a] + i] += w * Ns[a] * gx[i];
      }
    }
  }
  return rhs;
}

void apply_dirichlet_nodal(LinearSystem& sys, VecX& rhs, const std::map<int, Vec3>& values) {
  if (sys.dirichlet_nodes.empty()) throw SolverError("empty Dirichlet set");
  VecX lift = VecX::Zero(sys.n_dof);
  for (int nd : sys.dirichlet_nodes) {
    auto it = values.find(nd);
    if (it != values.end()) lift.segment<3>(3 * nd) = it->second;
  }
  sys.dirichlet_values = lift;
  rhs -= sys.A_free * lift;
  std::vector<char> fixed(sys.n_dof, 0);
  for (int nd : sys.dirichlet_nodes)
    for (int i = 0; i < 3; ++i) fixed[3 * nd + i] = 1;
  SparseMat A = sys.A_free;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      if (fixed[it.row()] || fixed[it.col()]) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
  A.prune(0.0);
  sys.A = std::move(A);
  sys.bc_applied = true;
  for (int d = 0; d < sys.n_dof; ++d)
    if (fixed[d]) rhs[d] = lift[d];
}

void apply_dirichlet(const Mesh& mesh, LinearSystem& sys, VecX& rhs,
                     const std::function<Vec3(const Vec3&)>& g_D) {
  std::map<int, Vec3> values;
  if (g_D)
    for (int nd : sys.dirichlet_nodes) values[nd] = g_D(mesh.nodes[nd]);
  apply_dirichlet_nodal(sys, rhs, values);
}

namespace {

SparseMat block_jacobi(const SparseMat& A) {
  int n = static_cast<int>(A.rows()) / 3;
  std::vector<Mat3> blocks(n, Mat3::Zero());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it) {
      int bi = static_cast<int>(it.row()) / 3, bj = static_cast<int>(it.col()) / 3;
      if (bi == bj) blocks[bi](it.row() % 3, it.col() % 3) = it.value();
    }
  std::vector<Triplet> trips;
  trips.reserve(9 * n);
  for (int b = 0; b < n; ++b) {
    Mat3 inv = blocks[b].inverse();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(3 * b + i, 3 * b + j, inv(i, j));
  }
  SparseMat P(A.rows(), A.cols());
  P.setFromTriplets(trips.begin(), trips.end());
  return P;
}

}  // namespace

VecX cg_solve(const SparseMat& A, const VecX& b, const SparseMat* P, double tol, int max_iter,
              const char* what) {
  VecX x = VecX::Zero(b.size());
  VecX r = b;
  double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  VecX z = P ? VecX(*P * r) : r;
  VecX p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    VecX Ap = A * p;
    double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    if (r.norm() <= tol * bnorm) return x;
    z = P ? VecX(*P * r) : r;
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverError(std::string(what) + ": CG did not converge, residual " +
                    std::to_string(r.norm() / bnorm));
}

DisplacementField solve(const Mesh& mesh, const LinearSystem& sys, const VecX& rhs,
                        const SolveOptions& opts) {
  if (sys.dirichlet_nodes.empty()) throw SolverError("empty Dirichlet set");
  if (!sys.bc_applied) throw SolverError("solve needs a constrained system (apply_dirichlet)");
  SparseMat P = block_jacobi(sys.A);
  DisplacementField u;
  u.degree = mesh.degree;
  u.coeffs = cg_solve(sys.A, rhs, &P, opts.tol, opts.max_iter, "elasticity solve");
  return u;
}

StressField stress(const Mesh& mesh, const DisplacementField& u, const MaterialParams& mat) {
  StressField s;
  s.cell_stress.resize(mesh.n_cells());
  s.cell_strain.resize(mesh.n_cells());
  const Vec3 centroid(0.25, 0.25, 0.25);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Mat3 g = eval_grad(mesh, u, c, centroid);
    Mat3 eps = sym(g);
    s.cell_strain[c] = eps;
    s.cell_stress[c] = mat.lambda * eps.trace() * Mat3::Identity() + 2.0 * mat.mu * eps;
  }
  return s;
}

Mat3 stress_at(const Mesh& mesh, const DisplacementField& u, const MaterialParams& mat, int c,
               const Vec3& xi) {
  Mat3 eps = sym(eval_grad(mesh, u, c, xi));
  return mat.lambda * eps.trace() * Mat3::Identity() + 2.0 * mat.mu * eps;
}

BoundaryStress boundary_stress(const Mesh& mesh, const DisplacementField& u,
                               const MaterialParams& mat, const SurfaceGeometry& geom) {
  BoundaryStress bs;
  if (mesh.degree == 1) {
    bs.p1_warning = true;
    std::cerr << "warning: D(sigma)[n] vanishes for degree-1 fields\n";
  }
  std::set<int> bverts;
  for (const auto& f : mesh.facets)
    for (int k = 0; k < 3; ++k) bverts.insert(f.nodes[k]);
  std::map<int, double> wsum;
  std::map<int, Mat3> sig, dsig_n;
  for (int v : bverts) {
    sig[v] = Mat3::Zero();
    dsig_n[v] = Mat3::Zero();
    wsum[v] = 0.0;
  }
  const Vec3 centroid(0.25, 0.25, 0.25);
  const Vec3 corner_xi[4] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    // collect boundary vertices adjacent to this cell
    bool touches = false;
    for (int a = 0; a < 4; ++a)
      if (bverts.count(mesh.cells[c][a])) touches = true;
    if (!touches) continue;
    double vol = mesh.cell_volume(c);
    // gradient of each stress component: exact for degree <= 2 fields
    CellFrame fr = cell_frame(mesh, c);
    Mat3 grad_sigma[3];  // grad_sigma[k] = d sigma / d x_k
    for (auto& gmat : grad_sigma) gmat = Mat3::Zero();
    if (mesh.degree == 2) {
      const double h = 0.08;
      for (int k = 0; k < 3; ++k) {
        Vec3 dxi = fr.jac_inv * Vec3::Unit(k) * h;
        Mat3 sp = stress_at(mesh, u, mat, c, centroid + dxi);
        Mat3 sm = stress_at(mesh, u, mat, c, centroid - dxi);
        grad_sigma[k] = (sp - sm) / (2.0 * h);  // exact: sigma linear per cell
      }
    }
    for (int a = 0; a < 4; ++a) {
      int v = mesh.cells[c][a];
      auto it = sig.find(v);
      if (it == sig.end()) continue;
      it->second += vol * stress_at(mesh, u, mat, c, corner_xi[a]);
      const Vec3& n = geom.normal_at(v);
      Mat3 dn = n[0] * grad_sigma[0] + n[1] * grad_sigma[1] + n[2] * grad_sigma[2];
      dsig_n[v] += vol * dn;
      wsum[v] += vol;
    }
  }
  for (int v : bverts) {
    bs.sigma[v] = sig[v] / wsum[v];
    bs.dsigma_dn[v] = dsig_n[v] / wsum[v];
  }
  return bs;
}

void field_norms(const Mesh& mesh, const DisplacementField& u, double* l2, double* h1_semi) {
  double a = 0.0, b = 0.0;
  auto rule = tet_rule_conical(3);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame fr = cell_frame(mesh, c);
    for (const auto& q : rule) {
      double w = q.w * fr.detJ;
      a += w * eval_field(mesh, u, c, q.xi).squaredNorm();
      b += w * eval_grad(mesh, u, c, q.xi).squaredNorm();
    }
  }
  if (l2) *l2 = std::sqrt(a);
  if (h1_semi) *h1_semi = std::sqrt(b);
}

double korn_smallest_ritz(const Mesh& mesh, const LinearSystem& sys, int iters) {
  // inverse power iteration on the constrained matrix
  (void)mesh;
  VecX v = VecX::Ones(sys.n_dof);
  for (int nd : sys.dirichlet_nodes)
    for (int i = 0; i < 3; ++i) v[3 * nd + i] = 0.0;
  v.normalize();
  SparseMat P = block_jacobi(sys.A);
  double lam = 0.0;
  for (int k = 0; k < iters; ++k) {
    VecX w = cg_solve(sys.A, v, &P, 1e-12, 200000, "korn inverse iteration");
    lam = 1.0 / w.norm();
    v = w.normalized();
  }
  return v.dot(sys.A * v);
}

}  // namespace shapeopt
