#pragma once

#include "shapeopt/functionals.hpp"
#include "shapeopt/material_derivative.hpp"
#include "shapeopt/velocity.hpp"

namespace shapeopt {

// Reynolds transport: dJ = int u_dot + u div(V) dx for J = int u dx.
double reynolds_volume(const Mesh& mesh, const std::function<double(const Vec3&)>& density,
                       const std::function<double(const Vec3&)>& density_dot,
                       const VelocityField& V);

// Surface form: dJ = int y_dot + y div_Gamma(V) dS for J = int_Gamma y dS.
double reynolds_surface(const Mesh& mesh, const std::function<double(const Vec3&)>& density,
                        const std::function<double(const Vec3&)>& density_dot,
                        const VelocityField& V);

// Shape derivative in material-derivative form: one quadrature pass over
// the explicit V terms plus the udot pairing of the density partials.
double dj_material_form(const Mesh& mesh, const DisplacementField& u,
                        const DisplacementField& udot, const MaterialParams& mat,
                        const LocalDensity& density, const VelocityField& V);

// Everything needed to re-solve the state on a perturbed domain.
struct StateProblem {
  Mesh mesh;
  MaterialParams mat;
  LoadSpec loads;
  SolveOptions solver;

  DisplacementField solve_state(const Mesh& on_mesh) const;
  double value(const Mesh& on_mesh, const LocalDensity& density) const;
};

struct FdResult {
  double value = 0.0;        // central difference at the smallest step
  double slope = 0.0;        // Richardson order estimate over t, t/2, t/4
  double richardson = 0.0;   // extrapolated value
  std::array<double, 3> central{};  // D(t), D(t/2), D(t/4)
};

// Central difference (J(Omega_t) - J(Omega_{-t})) / 2t with the RK4-flowed
// mesh and full state re-solve; reports the convergence slope.
FdResult fd_shape_derivative(const StateProblem& problem, const LocalDensity& density,
                             const VelocityField& V, double t, double h_max = 1e-2);

}  // namespace shapeopt
