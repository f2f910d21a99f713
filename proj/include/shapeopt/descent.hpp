#pragma once

#include "shapeopt/adjoint.hpp"
#include "shapeopt/tangential.hpp"
#include "shapeopt/velocity.hpp"

namespace shapeopt {

enum class DescentMethod { L2, HELMHOLTZ, VOLUME_EXTENSION };

struct ArmijoParams {
  double alpha0 = 1.0;      // scaled so the first trial respects step_cap
  double shrink = 0.5;
  double c1 = 1e-4;
  int max_backtracks = 12;
};

struct DescentConfig {
  DescentMethod method = DescentMethod::HELMHOLTZ;
  double c = -1.0;          // Helmholtz smoothing (mm^2); < 0: (2 mean edge)^2
  ArmijoParams armijo;
  int max_iters = 10;
  double quality_floor = 1e-3;    // min volume ratio
  double step_cap = 0.0;          // max vertex move per step (mm); 0: auto
  double grad_tol = 0.0;          // stop when ||G||_L2(Gamma) drops below
  int cutoff_layers = 2;          // Gamma_D freeze band (graph layers)
  int ramp_layers = 2;            // smooth ramp width after the band
  std::vector<int> frozen_tags;   // extra boundary tags that must not move
};

// Smooth factor in [0,1]: 0 within `cutoff_layers` graph layers of any
// Dirichlet (or frozen-tag) vertex, ramping to 1 over `ramp_layers`.
std::map<int, double> dirichlet_cutoff(const Mesh& mesh, const DescentConfig& cfg);

// W = -G n at boundary vertices, zero on Gamma_D and frozen tags.
std::map<int, Vec3> l2_direction(const Mesh& mesh, const ShapeGradientDensity& G,
                                 const SurfaceGeometry& geom, const DescentConfig& cfg);

// Componentwise surface Helmholtz smoothing: W = -(M + cK)^{-1} M (G n),
// with the same cutoff treatment. c = 0 reproduces the L2 direction.
std::map<int, Vec3> helmholtz_direction(const Mesh& mesh, const ShapeGradientDensity& G,
                                        const SurfaceGeometry& geom, const SurfaceOperator& ops,
                                        double c, const DescentConfig& cfg);

// Volume descent field: solve int eps(W):eps(V) dx = -dJ[V] over the FE
// space with W = 0 on Gamma_D; dJ as its assembled linear functional.
DisplacementField volume_extension_direction(const Mesh& mesh, const VecX& dj_functional,
                                             const DescentConfig& cfg,
                                             const SolveOptions& opts = {});

// Assembled functional V -> dJ[V] of the distributed shape derivative over
// nodal velocity fields (one column per dof by linearity).
VecX distributed_dj_functional(const Mesh& mesh, const DisplacementField& u,
                               const DisplacementField& p, const MaterialParams& mat,
                               const LoadSpec& loads, const LocalDensity& density);

// Harmonic-elastic extension of a boundary field into the volume:
// elasticity solve with Dirichlet data W on the whole boundary.
std::vector<Vec3> extend_to_volume(const Mesh& mesh, const MaterialParams& mat,
                                   const std::map<int, Vec3>& boundary_field,
                                   const SolveOptions& opts = {});

// Discrete H1(Gamma) seminorm of a boundary vertex field.
double surface_h1_seminorm(const SurfaceOperator& ops, const std::map<int, Vec3>& w);

double mean_edge_length(const Mesh& mesh);

}  // namespace shapeopt
