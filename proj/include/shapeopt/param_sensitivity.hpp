#pragma once

#include <functional>

#include "shapeopt/types.hpp"

namespace shapeopt {

// Parameter-dependent family of variational problems B(t) u = l(t) with
// analytic derivatives. The sensitivity q at t0 solves
//   B(t0) q = ldot(t0) - Bdot(t0) u(t0),
// and is checked against a central finite difference of the solutions.
struct ParamFamily {
  std::function<SparseMat(double)> B;
  std::function<SparseMat(double)> Bdot;
  std::function<VecX(double)> l;
  std::function<VecX(double)> ldot;
};

struct SensitivityReport {
  VecX q;
  double rel_error_vs_fd = 0.0;
  double coercivity_lo = 0.0;   // smallest Ritz estimate at t0 - h
  double coercivity_hi = 0.0;   // and at t0 + h
  bool hypothesis_violation = false;  // B(t) failed to be positive definite
};

SensitivityReport param_sensitivity_check(const ParamFamily& family, double t0, double h);

}  // namespace shapeopt
