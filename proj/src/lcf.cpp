#include "shapeopt/lcf.hpp"

#include <cmath>
#include <limits>

namespace shapeopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Safeguarded Newton on a strictly monotone function with a bracketing
// interval; falls back to bisection whenever Newton leaves the bracket.
template <typename F, typename DF>
double newton_bracketed(F f, DF df, double target, double lo, double hi, double tol,
                        int max_iter, bool increasing) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    double fx = f(x) - target;
    if (std::abs(fx) <= tol * std::max(1.0, std::abs(target))) return x;
    if ((fx > 0) == increasing)
      hi = x;
    else
      lo = x;
    double d = df(x);
    double step = fx / d;
    double xn = x - step;
    if (!(xn > lo && xn < hi) || !std::isfinite(xn)) xn = 0.5 * (lo + hi);
    x = xn;
  }
  double fx = f(x) - target;
  if (std::abs(fx) <= 1e3 * tol * std::max(1.0, std::abs(target))) return x;
  throw NumericError("monotone inversion did not converge");
}

}  // namespace

LcfChain::LcfChain(const MaterialParams& mat, double newton_tol, int newton_max_iter,
                   double amplitude_factor)
    : mat_(mat), tol_(newton_tol), max_iter_(newton_max_iter), amp_(amplitude_factor) {
  if (mat_.E <= 0 || mat_.K <= 0) throw ConfigError("LCF chain needs E, K > 0");
}

Mat3 LcfChain::tf(const Mat3& sigma) {
  return sigma - (sigma.trace() / 3.0) * Mat3::Identity();
}

double LcfChain::vm(const Mat3& sigma_dev) {
  return std::sqrt(1.5 * ddot(sigma_dev, sigma_dev));
}

double LcfChain::sd(double s) const {
  double q = mat_.E / std::pow(mat_.K, 1.0 / mat_.n_hat);
  return std::sqrt(s * s + q * std::pow(s, 1.0 + 1.0 / mat_.n_hat));
}

double LcfChain::sd_inverse(double sigma_v) const {
  if (sigma_v < 0) throw NumericError("sd_inverse needs a nonnegative argument");
  if (sigma_v == 0) return 0.0;
  // SD(s) >= s, so [0, sigma_v] brackets the root
  return newton_bracketed([this](double s) { return sd(s); },
                          [this](double s) {
                            double q = mat_.E / std::pow(mat_.K, 1.0 / mat_.n_hat);
                            double e = 1.0 + 1.0 / mat_.n_hat;
                            double val = s * s + q * std::pow(s, e);
                            return (2.0 * s + q * e * std::pow(s, e - 1.0)) /
                                   (2.0 * std::sqrt(val));
                          },
                          sigma_v, 0.0, sigma_v, tol_, max_iter_, true);
}

double LcfChain::ro(double s) const {
  return s / mat_.E + std::pow(s / mat_.K, 1.0 / mat_.n_hat);
}

double LcfChain::cmb(double n) const {
  return mat_.sigma_f_prime / mat_.E * std::pow(2.0 * n, mat_.b) +
         mat_.eps_f_prime * std::pow(2.0 * n, mat_.c);
}

double LcfChain::cmb_inverse(double eps) const {
  if (eps < 0) throw NumericError("cmb_inverse needs a nonnegative argument");
  if (eps == 0) return kInf;
  // CMB is strictly decreasing with range (0, inf); bracket by doubling
  double lo = 1.0, hi = 1.0;
  while (cmb(lo) < eps) lo *= 0.5;
  while (cmb(hi) > eps) hi *= 2.0;
  // Newton in log(N), bisection safeguarded
  double llo = std::log(lo), lhi = std::log(hi);
  double lx = 0.5 * (llo + lhi);
  for (int it = 0; it < max_iter_; ++it) {
    double n = std::exp(lx);
    double fx = cmb(n) - eps;
    if (std::abs(fx) <= tol_ * eps) return n;
    if (fx > 0)
      llo = lx;  // cmb too large -> n too small
    else
      lhi = lx;
    double dfdn = mat_.sigma_f_prime / mat_.E * mat_.b * 2.0 * std::pow(2.0 * n, mat_.b - 1.0) +
                  mat_.eps_f_prime * mat_.c * 2.0 * std::pow(2.0 * n, mat_.c - 1.0);
    double dlx = fx / (dfdn * n);  // d/dlx cmb(e^lx) = dfdn * n
    double lxn = lx - dlx;
    if (!(lxn > llo && lxn < lhi) || !std::isfinite(lxn)) lxn = 0.5 * (llo + lhi);
    lx = lxn;
  }
  double n = std::exp(lx);
  if (std::abs(cmb(n) - eps) <= 1e3 * tol_ * eps) return n;
  throw NumericError("cmb_inverse did not converge");
}

double LcfChain::n_det(const Mat3& sigma) const {
  double sv = amp_ * vm(tf(sigma));
  if (sv == 0.0) return kInf;
  return cmb_inverse(ro(sd_inverse(sv)));
}

// ---- squared-variable chain -------------------------------------------------

double LcfChain::sd_tilde(double x) const {
  double q = mat_.E / std::pow(mat_.K, 1.0 / mat_.n_hat);
  double e = (mat_.n_hat + 1.0) / (2.0 * mat_.n_hat);
  return x + q * std::pow(x, e);
}

double LcfChain::sd_tilde_prime(double x) const {
  double q = mat_.E / std::pow(mat_.K, 1.0 / mat_.n_hat);
  double e = (mat_.n_hat + 1.0) / (2.0 * mat_.n_hat);
  return 1.0 + q * e * std::pow(x, e - 1.0);
}

double LcfChain::sd_tilde_inverse(double y) const {
  if (y <= 0) return 0.0;
  return newton_bracketed([this](double x) { return sd_tilde(x); },
                          [this](double x) { return sd_tilde_prime(x); }, y, 0.0, y, tol_,
                          max_iter_, true);
}

double LcfChain::ro_tilde(double x) const {
  double e = (mat_.n_hat + 1.0) / (2.0 * mat_.n_hat);
  return x / (mat_.E * mat_.E) +
         2.0 / (mat_.E * std::pow(mat_.K, 1.0 / mat_.n_hat)) * std::pow(x, e) +
         std::pow(x, 1.0 / mat_.n_hat) / std::pow(mat_.K, 2.0 / mat_.n_hat);
}

double LcfChain::ro_tilde_prime(double x) const {
  double e = (mat_.n_hat + 1.0) / (2.0 * mat_.n_hat);
  return 1.0 / (mat_.E * mat_.E) +
         2.0 * e / (mat_.E * std::pow(mat_.K, 1.0 / mat_.n_hat)) * std::pow(x, e - 1.0) +
         std::pow(x, 1.0 / mat_.n_hat - 1.0) / (mat_.n_hat * std::pow(mat_.K, 2.0 / mat_.n_hat));
}

double LcfChain::cmb_tilde(double y) const {
  // (CMB(N))^2 expressed through y = N^{-m}
  double c1 = std::pow(std::pow(2.0, mat_.b) * mat_.sigma_f_prime / mat_.E, 2.0);
  double c2 = mat_.sigma_f_prime * mat_.eps_f_prime * std::pow(2.0, 1.0 + mat_.b + mat_.c) / mat_.E;
  double c3 = std::pow(2.0, 2.0 * mat_.c) * mat_.eps_f_prime * mat_.eps_f_prime;
  return c1 * std::pow(y, -2.0 * mat_.b / mat_.m) + c2 * std::pow(y, -(mat_.b + mat_.c) / mat_.m) +
         c3 * std::pow(y, -2.0 * mat_.c / mat_.m);
}

double LcfChain::cmb_tilde_prime(double y) const {
  double c1 = std::pow(std::pow(2.0, mat_.b) * mat_.sigma_f_prime / mat_.E, 2.0);
  double c2 = mat_.sigma_f_prime * mat_.eps_f_prime * std::pow(2.0, 1.0 + mat_.b + mat_.c) / mat_.E;
  double c3 = std::pow(2.0, 2.0 * mat_.c) * mat_.eps_f_prime * mat_.eps_f_prime;
  double e1 = -2.0 * mat_.b / mat_.m, e2 = -(mat_.b + mat_.c) / mat_.m, e3 = -2.0 * mat_.c / mat_.m;
  return c1 * e1 * std::pow(y, e1 - 1.0) + c2 * e2 * std::pow(y, e2 - 1.0) +
         c3 * e3 * std::pow(y, e3 - 1.0);
}

double LcfChain::cmb_tilde_inverse(double z) const {
  if (z <= 0) return 0.0;
  // strictly increasing in y with power-law behavior spanning hundreds of
  // orders of magnitude; Newton in log-log coordinates
  double lo = 1.0, hi = 1.0;
  while (cmb_tilde(lo) > z) {
    lo *= 0.25;
    if (lo < 1e-290) return 0.0;  // density below double range
  }
  while (cmb_tilde(hi) < z) hi *= 4.0;
  double llo = std::log(lo), lhi = std::log(hi);
  double w = 0.5 * (llo + lhi);
  double lz = std::log(z);
  for (int it = 0; it < max_iter_; ++it) {
    double y = std::exp(w);
    double f = cmb_tilde(y);
    double r = std::log(f) - lz;
    if (std::abs(f - z) <= tol_ * z) return y;
    if (r > 0)
      lhi = w;
    else
      llo = w;
    double d = cmb_tilde_prime(y) * y / f;  // d/dw log f(e^w)
    double wn = w - r / d;
    if (!(wn > llo && wn < lhi) || !std::isfinite(wn)) wn = 0.5 * (llo + lhi);
    w = wn;
  }
  double y = std::exp(w);
  if (std::abs(cmb_tilde(y) - z) <= 1e3 * tol_ * z) return y;
  throw NumericError("cmb_tilde_inverse did not converge");
}

double LcfChain::g_of_x(double x) const {
  if (x <= 0) return 0.0;
  return cmb_tilde_inverse(ro_tilde(sd_tilde_inverse(x)));
}

double LcfChain::dg_dx(double x) const {
  if (x <= 0) return 0.0;
  double u = sd_tilde_inverse(x);
  double v = ro_tilde(u);
  double y = cmb_tilde_inverse(v);
  double du = 1.0 / sd_tilde_prime(u);          // (SD~^{-1})'
  double dv = ro_tilde_prime(u);
  double dy = 1.0 / cmb_tilde_prime(y);         // (CMB~^{-1})'
  return dy * dv * du;
}

double LcfChain::f_lcf(const Mat3& sigma) const {
  Mat3 dev = tf(sigma);
  double x = amp_ * amp_ * 1.5 * ddot(dev, dev);  // (amp * vm)^2
  return g_of_x(x);
}

Mat3 LcfChain::df_lcf(const Mat3& sigma) const {
  Mat3 dev = tf(sigma);
  double x = amp_ * amp_ * 1.5 * ddot(dev, dev);
  if (x <= 0) return Mat3::Zero();
  // d(vm^2 o tf)/dsigma = 3 tf(sigma)
  return dg_dx(x) * amp_ * amp_ * 3.0 * dev;
}

}  // namespace shapeopt
