#pragma once

#include "shapeopt/fem.hpp"
#include "shapeopt/loads.hpp"
#include "shapeopt/velocity.hpp"

namespace shapeopt {

// Transport derivatives of the load and bilinear forms at t = 0 in the
// direction V, evaluated through the FE interpolant of V so that discrete
// identities are exact:
//   Ldot(v) = int <f_V, v> dx + int_{Gamma_N} <g_V, v> dS
//   Bdot(u,v) = int tr(eps_dot(u) sigma(v) + sigma(u) eps_dot(v)
//                      + div(V) sigma(u) eps(v)) dx,
// with eps_dot(w) = -sym(Dw DV).
VecX assemble_ldot(const Mesh& mesh, const LoadSpec& loads, const VelocityField& V);
VecX assemble_bdot_times_u(const Mesh& mesh, const MaterialParams& mat,
                           const DisplacementField& u, const VelocityField& V);
// Bdot as a matrix (generic sensitivity analysis path).
SparseMat assemble_bdot_matrix(const Mesh& mesh, const MaterialParams& mat,
                               const VelocityField& V);

// rhs of the material-derivative problem: Ldot(v) - Bdot(u, v), with
// homogeneous Dirichlet rows.
VecX material_derivative_rhs(const Mesh& mesh, const LinearSystem& sys,
                             const DisplacementField& u, const MaterialParams& mat,
                             const LoadSpec& loads, const VelocityField& V);

// Solves B(udot, v) = Ldot(v) - Bdot(u, v) with the state stiffness matrix.
DisplacementField solve_material_derivative(const Mesh& mesh, const LinearSystem& sys,
                                            const DisplacementField& u,
                                            const MaterialParams& mat, const LoadSpec& loads,
                                            const VelocityField& V,
                                            const SolveOptions& opts = {});

// Pointwise u' = udot - Du V on the nodes (cell-averaged nodal gradients).
DisplacementField local_shape_derivative(const Mesh& mesh, const DisplacementField& u,
                                         const DisplacementField& udot, const VelocityField& V);

// Volume-averaged nodal gradient of a displacement field.
std::vector<Mat3> averaged_nodal_gradient(const Mesh& mesh, const DisplacementField& u);

}  // namespace shapeopt
