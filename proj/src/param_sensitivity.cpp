#include "shapeopt/param_sensitivity.hpp"

#include <Eigen/SparseCholesky>

namespace shapeopt {

namespace {

// LDLT solve; reports indefiniteness through the flag.
VecX spd_solve(const SparseMat& A, const VecX& b, bool* indefinite) {
  Eigen::SimplicialLDLT<SparseMat> ldlt(A);
  if (ldlt.info() != Eigen::Success) {
    if (indefinite) *indefinite = true;
    throw SolverError("sensitivity matrix factorization failed");
  }
  if (ldlt.vectorD().minCoeff() <= 0.0 && indefinite) *indefinite = true;
  return ldlt.solve(b);
}

double smallest_ritz(const SparseMat& A, int iters, bool* indefinite) {
  Eigen::SimplicialLDLT<SparseMat> ldlt(A);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
    if (indefinite) *indefinite = true;
    return 0.0;
  }
  VecX v = VecX::Ones(A.rows()).normalized();
  for (int k = 0; k < iters; ++k) v = VecX(ldlt.solve(v)).normalized();
  return v.dot(A * v);
}

}  // namespace

SensitivityReport param_sensitivity_check(const ParamFamily& family, double t0, double h) {
  SensitivityReport rep;
  SparseMat B0 = family.B(t0);
  VecX u0 = spd_solve(B0, family.l(t0), &rep.hypothesis_violation);
  VecX rhs = family.ldot(t0) - family.Bdot(t0) * u0;
  rep.q = spd_solve(B0, rhs, &rep.hypothesis_violation);

  bool ind = false;
  VecX up = spd_solve(family.B(t0 + h), family.l(t0 + h), &ind);
  VecX um = spd_solve(family.B(t0 - h), family.l(t0 - h), &ind);
  rep.hypothesis_violation = rep.hypothesis_violation || ind;
  VecX fd = (up - um) / (2.0 * h);
  double qn = rep.q.norm();
  rep.rel_error_vs_fd = (qn > 0) ? (rep.q - fd).norm() / qn : fd.norm();

  rep.coercivity_lo = smallest_ritz(family.B(t0 - h), 15, &ind);
  rep.coercivity_hi = smallest_ritz(family.B(t0 + h), 15, &ind);
  rep.hypothesis_violation = rep.hypothesis_violation || ind;
  return rep;
}

}  // namespace shapeopt
