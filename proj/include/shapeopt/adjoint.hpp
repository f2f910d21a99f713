#pragma once

#include "shapeopt/functionals.hpp"
#include "shapeopt/loads.hpp"
#include "shapeopt/material_derivative.hpp"
#include "shapeopt/tangential.hpp"

namespace shapeopt {

// Assembly variants for the sigma-driven surface adjoint right-hand side.
//  DIRECT      pairs M : sigma(test) through the owner-cell gradients; this
//              is the discrete pairing used by the material/distributed
//              forms, so the adjoint identity holds to solver accuracy.
//  WEAK_STOKES moves the tangential derivatives onto the test function
//              (no derivatives of M); default for gradient densities.
//  STRONG_H    assembles the boundary field h with discrete tangential
//              derivatives of M; kept as a cross-check.
enum class AdjointRhsMode { DIRECT, WEAK_STOKES, STRONG_H };

struct AdjointSpec {
  const LocalDensity* density = nullptr;
  AdjointRhsMode mode = AdjointRhsMode::DIRECT;
};

// The adjoint load functional as a vector over test dofs.
VecX assemble_adjoint_rhs(const Mesh& mesh, const DisplacementField& u,
                          const MaterialParams& mat, const AdjointSpec& spec,
                          const SurfaceGeometry* geom = nullptr,
                          const SurfaceOperator* ops = nullptr,
                          const BoundaryStress* bstress = nullptr);

// Adjoint state with homogeneous Dirichlet data, reusing the state matrix.
DisplacementField solve_adjoint(const Mesh& mesh, const LinearSystem& sys,
                                const DisplacementField& u, const MaterialParams& mat,
                                const AdjointSpec& spec, const SurfaceGeometry* geom = nullptr,
                                const SurfaceOperator* ops = nullptr,
                                const BoundaryStress* bstress = nullptr,
                                const SolveOptions& opts = {});

// Scalar boundary density G with dJ[V] = int_{Gamma_N} G <V,n> dS.
// Zero on Dirichlet vertices by admissibility.
struct ShapeGradientDensity {
  std::map<int, double> values;  // boundary vertex -> G
};

ShapeGradientDensity hadamard_density(const Mesh& mesh, const DisplacementField& u,
                                      const DisplacementField& p, const MaterialParams& mat,
                                      const LoadSpec& loads, const AdjointSpec& spec,
                                      const SurfaceGeometry& geom, const SurfaceOperator& ops,
                                      const BoundaryStress& bstress);

// dJ[V] as volume+surface quadrature in V and DV; no curvature and no
// second derivatives of u. Exactly matches dj_material_form when p was
// solved with the DIRECT right-hand side.
double distributed_shape_derivative(const Mesh& mesh, const DisplacementField& u,
                                    const DisplacementField& p, const MaterialParams& mat,
                                    const LoadSpec& loads, const LocalDensity& density,
                                    const VelocityField& V);

// Boundary quadrature of G <V,n> over the Neumann surface.
double dj_from_gradient(const Mesh& mesh, const SurfaceGeometry& geom,
                        const ShapeGradientDensity& G, const VelocityField& V);

}  // namespace shapeopt
