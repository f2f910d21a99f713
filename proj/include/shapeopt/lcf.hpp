#pragma once

#include "shapeopt/fem.hpp"
#include "shapeopt/types.hpp"

namespace shapeopt {

// Deterministic crack-initiation life chain for cyclic surface loading and
// the induced scalar density f = N_det^{-m} with its stress derivative.
//
// The chain composes TF -> VM -> SD^{-1} -> RO -> CMB^{-1}. For the density
// and its derivative the same composition is evaluated in the squared
// comparison-stress variable, which stays smooth through ker(TF).
class LcfChain {
 public:
  explicit LcfChain(const MaterialParams& mat, double newton_tol = 1e-12,
                    int newton_max_iter = 100, double amplitude_factor = 1.0);

  static Mat3 tf(const Mat3& sigma);
  static double vm(const Mat3& sigma_dev);

  double sd(double s_elpl) const;       // Neuber comparison map
  double sd_inverse(double sigma_v) const;
  double ro(double s_elpl) const;       // Ramberg-Osgood strain
  double cmb(double n) const;           // Coffin-Manson-Basquin strain amplitude
  double cmb_inverse(double eps) const; // cycles to crack initiation (may be inf)

  double n_det(const Mat3& sigma) const;

  // density f = N_det(sigma)^{-m} and its derivative with respect to sigma
  double f_lcf(const Mat3& sigma) const;
  Mat3 df_lcf(const Mat3& sigma) const;

  // squared-variable chain g with f = g(vm^2(tf(sigma))); exposed for tests
  double g_of_x(double x) const;
  double dg_dx(double x) const;

  const MaterialParams& material() const { return mat_; }

 private:
  double sd_tilde(double x) const;        // SD^2 in the squared variable
  double sd_tilde_prime(double x) const;
  double sd_tilde_inverse(double y) const;
  double ro_tilde(double x) const;        // RO^2 in the squared variable
  double ro_tilde_prime(double x) const;
  double cmb_tilde(double y) const;       // CMB^2 as a function of N^{-m}
  double cmb_tilde_prime(double y) const;
  double cmb_tilde_inverse(double z) const;

  MaterialParams mat_;
  double tol_;
  int max_iter_;
  double amp_;  // multiplier on the comparison stress (1: use sigma_v as-is)
};

}  // namespace shapeopt
