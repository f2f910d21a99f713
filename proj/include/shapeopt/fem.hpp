#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "shapeopt/mesh.hpp"
#include "shapeopt/quadrature.hpp"
#include "shapeopt/surface.hpp"

namespace shapeopt {

// Isotropic material in the mm/N/MPa unit system.
struct MaterialParams {
  double lambda = 0.0, mu = 0.0;  // Lame coefficients, MPa
  double E = 0.0, nu = 0.0;
  double K = 443.9, n_hat = 0.064;               // Ramberg-Osgood
  double sigma_f_prime = 2536.0, eps_f_prime = 0.254, b = -0.07, c = -0.593;
  double m = 2.0;        // Weibull shape
  double sigma_0 = 100.0;  // ceramic scale, MPa

  static MaterialParams from_E_nu(double E, double nu);
  void check() const;  // throws ConfigError on invariant violations
};

// Shape functions of the 4- and 10-node tetrahedron at a reference point.
// Values and reference-space gradients; ordering matches Mesh cells.
void tet_shape(int degree, const Vec3& xi, double* N, Vec3* dN);
// Triangle shape functions (3- or 6-node) at a reference point (xi, eta).
void tri_shape(int degree, double xi, double eta, double* N, Vec3* dN2);

// Per-cell affine geometry of the straight-sided tet.
struct CellFrame {
  Mat3 jac;      // dx/dxi
  Mat3 jac_inv;  // dxi/dx
  double detJ;
  Vec3 x0;
};
CellFrame cell_frame(const Mesh& mesh, int c);

// Vector-valued nodal field with 3 dof per node.
struct DisplacementField {
  int degree = 1;
  VecX coeffs;  // 3 * n_nodes
  Vec3 at_node(int n) const { return Vec3(coeffs[3 * n], coeffs[3 * n + 1], coeffs[3 * n + 2]); }
  void set_node(int n, const Vec3& v) {
    coeffs[3 * n] = v[0];
    coeffs[3 * n + 1] = v[1];
    coeffs[3 * n + 2] = v[2];
  }
};

// Field value / gradient of a nodal field inside a cell.
Vec3 eval_field(const Mesh& mesh, const DisplacementField& u, int c, const Vec3& xi);
Mat3 eval_grad(const Mesh& mesh, const DisplacementField& u, int c, const Vec3& xi);

struct LinearSystem {
  SparseMat A;        // after symmetric Dirichlet elimination
  SparseMat A_free;   // unconstrained operator (reactions, rigid-mode tests)
  VecX rhs;
  std::vector<int> dirichlet_nodes;   // node indices with prescribed values
  VecX dirichlet_values;              // full-length lift vector (zero off Gamma_D)
  int n_dof = 0;
  bool bc_applied = false;
};

// Stiffness of the elasticity bilinear form on the P1/P2 space.
LinearSystem assemble_elasticity(const Mesh& mesh, const MaterialParams& mat);

using VolumeLoad = std::function<Vec3(const Vec3&)>;
// Surface loads may depend on the facet tag.
using SurfaceLoad = std::function<Vec3(const Vec3&, int tag)>;

// Load vector: volume force f (N/mm^3) plus Neumann traction g (MPa).
// Tractions supplied on Dirichlet facets are skipped with a warning flag.
VecX assemble_load(const Mesh& mesh, const VolumeLoad& f, const SurfaceLoad& g,
                   bool* warned_dirichlet_traction = nullptr);

// Applies u = g_D on the Dirichlet node set by symmetric elimination.
void apply_dirichlet(const Mesh& mesh, LinearSystem& sys, VecX& rhs,
                     const std::function<Vec3(const Vec3&)>& g_D);

// Same with explicit per-node values (missing nodes are clamped to zero).
void apply_dirichlet_nodal(LinearSystem& sys, VecX& rhs, const std::map<int, Vec3>& values);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 200000;
};

// Preconditioned CG with 3x3 nodal block-diagonal preconditioning.
// Deterministic: fixed operation order, single thread.
DisplacementField solve(const Mesh& mesh, const LinearSystem& sys, const VecX& rhs,
                        const SolveOptions& opts = {});

// Plain CG on an SPD operator (used for surface solves as well).
VecX cg_solve(const SparseMat& A, const VecX& b, const SparseMat* block_precond,
              double tol, int max_iter, const char* what);

// Stress sigma = lambda div(u) I + mu (Du + Du^T) per cell (P1: constant;
// P2: evaluated at cell quadrature points on demand).
struct StressField {
  std::vector<Mat3> cell_stress;  // cell-mean stress
  std::vector<Mat3> cell_strain;
};
StressField stress(const Mesh& mesh, const DisplacementField& u, const MaterialParams& mat);

Mat3 stress_at(const Mesh& mesh, const DisplacementField& u, const MaterialParams& mat, int c,
               const Vec3& xi);

// Boundary recovery: volume-weighted vertex averages of sigma and of the
// normal directional derivative D(sigma)[n]. The latter vanishes for P1
// fields (a warning flag is raised).
struct BoundaryStress {
  std::map<int, Mat3> sigma;        // boundary vertex -> stress
  std::map<int, Mat3> dsigma_dn;    // boundary vertex -> directional derivative of sigma along n
  bool p1_warning = false;
};
BoundaryStress boundary_stress(const Mesh& mesh, const DisplacementField& u,
                               const MaterialParams& mat, const SurfaceGeometry& geom);

// Energy norms over the mesh: returns (L2 norm, H1 seminorm) of the field.
void field_norms(const Mesh& mesh, const DisplacementField& u, double* l2, double* h1_semi);

// Smallest Ritz value of the constrained operator by inverse power iteration.
double korn_smallest_ritz(const Mesh& mesh, const LinearSystem& sys, int iters = 20);

}  // namespace shapeopt
