#include <doctest.h>

#include <cmath>
#include <random>

#include "shapeopt/functionals.hpp"
#include "shapeopt/primitives.hpp"

using namespace shapeopt;

namespace {

MaterialParams paper_material() { return MaterialParams::from_E_nu(70000.0, 0.3); }

Mat3 random_symmetric(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = gauss(rng);
  return sym(m);
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// independent bisection inversion of a monotone map
template <typename F>
double bisect(F f, double target, double lo, double hi, bool increasing) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if ((f(mid) < target) == increasing)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("trace-free projection") {
  CHECK(LcfChain::tf(2.5 * Mat3::Identity()).norm() == 0.0);

  Mat3 d = Mat3::Zero();
  d(0, 0) = 3.0;
  Mat3 expect = Mat3::Zero();
  expect(0, 0) = 2.0;
  expect(1, 1) = expect(2, 2) = -1.0;
  CHECK((LcfChain::tf(d) - expect).norm() < 1e-14);

  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    Mat3 s = random_symmetric(rng, 100.0);
    Mat3 brute = s - s.trace() / 3.0 * Mat3::Identity();
    CHECK((LcfChain::tf(s) - brute).norm() < 1e-12 * s.norm());
  }
}

TEST_CASE("von Mises stress identities") {
  CHECK(LcfChain::vm(Mat3::Zero()) == 0.0);
  Mat3 d = Mat3::Zero();
  d(0, 0) = -7.0;
  CHECK(LcfChain::vm(LcfChain::tf(d)) == doctest::Approx(7.0).epsilon(1e-13));
  double tau = 3.2;
  Mat3 shear = Mat3::Zero();
  shear(0, 1) = shear(1, 0) = tau;
  CHECK(LcfChain::vm(shear) == doctest::Approx(std::sqrt(3.0) * tau).epsilon(1e-13));
}

TEST_CASE("Neuber inversion round trips against a bisection oracle") {
  LcfChain chain(paper_material());
  CHECK(chain.sd_inverse(0.0) == 0.0);
  for (double y : {1.0, 300.0, 2000.0}) {
    double s = chain.sd_inverse(y);
    CHECK(chain.sd(s) == doctest::Approx(y).epsilon(1e-10));
    double oracle = bisect([&](double x) { return chain.sd(x); }, y, 0.0, y, true);
    CHECK(s == doctest::Approx(oracle).epsilon(1e-9));
  }
  double prev = -1.0;
  for (double y = 0.5; y < 4000.0; y *= 1.7) {
    double s = chain.sd_inverse(y);
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("Ramberg-Osgood values") {
  MaterialParams mat = paper_material();
  LcfChain chain(mat);
  CHECK(chain.ro(0.0) == 0.0);
  CHECK(chain.ro(mat.K) == doctest::Approx(mat.K / mat.E + 1.0).epsilon(1e-13));
  CHECK(chain.ro(mat.E) ==
        doctest::Approx(1.0 + std::pow(mat.E / mat.K, 1.0 / mat.n_hat)).epsilon(1e-13));
}

TEST_CASE("CMB inversion: limits, round trips, monotonicity") {
  LcfChain chain(paper_material());
  CHECK(std::isinf(chain.cmb_inverse(0.0)));
  for (double n : {1e2, 1e4, 1e6}) {
    double eps = chain.cmb(n);
    CHECK(chain.cmb_inverse(eps) == doctest::Approx(n).epsilon(1e-8));
    double oracle = bisect([&](double lo) { return chain.cmb(lo); }, eps, 1e-3, 1e12, false);
    CHECK(chain.cmb_inverse(eps) == doctest::Approx(oracle).epsilon(1e-7));
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double eps = 1e-4; eps < 1e-1; eps *= 2.0) {
    double n = chain.cmb_inverse(eps);
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("deterministic life: kernel, frame invariance, monotonicity") {
  LcfChain chain(paper_material());
  CHECK(std::isinf(chain.n_det(40.0 * Mat3::Identity())));

  std::mt19937_64 rng(23);
  Mat3 uni = Mat3::Zero();
  uni(0, 0) = 350.0;
  double n0 = chain.n_det(uni);
  for (int k = 0; k < 5; ++k) {
    Mat3 R = random_rotation(rng);
    CHECK(chain.n_det(R * uni * R.transpose()) == doctest::Approx(n0).epsilon(1e-9));
  }

  Mat3 uni2 = Mat3::Zero();
  uni2(0, 0) = 500.0;
  CHECK(chain.n_det(uni2) < n0);
}

TEST_CASE("lcf density: kernel continuation and tilde/plain agreement") {
  MaterialParams mat = paper_material();
  LcfChain chain(mat);
  CHECK(chain.f_lcf(-3.0 * Mat3::Identity()) == 0.0);
  CHECK(chain.df_lcf(-3.0 * Mat3::Identity()).norm() == 0.0);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    Mat3 s = random_symmetric(rng, 250.0);
    double plain = std::pow(chain.n_det(s), -mat.m);
    CHECK(chain.f_lcf(s) == doctest::Approx(plain).epsilon(1e-10));
  }
}

TEST_CASE("lcf density derivative matches central finite differences") {
  LcfChain chain(paper_material());
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) {
    Mat3 s = random_symmetric(rng, 300.0);
    Mat3 d = chain.df_lcf(s);
    Mat3 h = random_symmetric(rng, 1.0);
    h /= h.norm();
    double step = 1e-3 * s.norm();
    double fd = (chain.f_lcf(s + step * h) - chain.f_lcf(s - step * h)) / (2.0 * step);
    CHECK(ddot(d, h) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("lcf density frame invariance and load monotonicity") {
  LcfChain chain(paper_material());
  std::mt19937_64 rng(9);
  Mat3 s = random_symmetric(rng, 200.0);
  for (int k = 0; k < 5; ++k) {
    Mat3 R = random_rotation(rng);
    CHECK(chain.f_lcf(R * s * R.transpose()) == doctest::Approx(chain.f_lcf(s)).epsilon(1e-9));
  }
  CHECK(chain.f_lcf(1.3 * s) > chain.f_lcf(s));
}

TEST_CASE("sphere quadrature: weights and exactness") {
  SphereQuadrature quad = SphereQuadrature::gauss_product();
  CHECK(quad.total_weight() == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
  for (double w : quad.weights) CHECK(w > 0.0);
  double m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < quad.nodes.size(); ++i) {
    m1 += quad.weights[i] * quad.nodes[i][0];
    m2 += quad.weights[i] * quad.nodes[i][0] * quad.nodes[i][0];
  }
  CHECK(std::abs(m1) < 1e-13);
  CHECK(m2 == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
}

TEST_CASE("ceramic density closed forms") {
  SphereQuadrature quad = SphereQuadrature::gauss_product();
  double s0 = 75.0;
  CHECK(f_cer(s0 * Mat3::Identity(), quad, 2.0, s0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f_cer(-40.0 * Mat3::Identity(), quad, 5.0, s0) == 0.0);
  for (double m : {2.0, 5.0, 10.0}) {
    double s = 120.0;
    Mat3 uni = Mat3::Zero();
    uni(0, 0) = s;
    double expect = std::pow(s / s0, m) / (2.0 * m + 1.0);
    CHECK(f_cer(uni, quad, m, s0) == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK_THROWS_AS(f_cer(Mat3::Identity(), quad, 0.5, s0), NumericError);
}

TEST_CASE("ceramic density: frame invariance, monotonicity, derivative FD") {
  SphereQuadrature quad = SphereQuadrature::gauss_product();
  std::mt19937_64 rng(77);
  double m = 5.0, s0 = 100.0;
  Mat3 s = random_symmetric(rng, 150.0);
  double base = f_cer(s, quad, m, s0);
  for (int k = 0; k < 5; ++k) {
    Mat3 R = random_rotation(rng);
    CHECK(f_cer(R * s * R.transpose(), quad, m, s0) == doctest::Approx(base).epsilon(1e-6));
  }
  CHECK(f_cer(1.25 * s, quad, m, s0) > base);

  for (int k = 0; k < 20; ++k) {
    Mat3 sig = random_symmetric(rng, 150.0);
    Mat3 d = df_cer(sig, quad, m, s0);
    Mat3 h = random_symmetric(rng, 1.0);
    h /= h.norm();
    double step = 1e-3 * sig.norm();
    double fd =
        (f_cer(sig + step * h, quad, m, s0) - f_cer(sig - step * h, quad, m, s0)) / (2.0 * step);
    CHECK(ddot(d, h) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("functionals on simple displacement states") {
  MaterialParams mat = paper_material();
  mat.sigma_0 = 50.0;
  Mesh mesh = make_unit_cube(2);
  DisplacementField u;
  u.degree = 1;
  u.coeffs = VecX::Zero(3 * mesh.n_nodes());

  LcfDensity lcf(mat);
  CeramicDensity cer(mat);

  // rigid motion: zero stress, zero functionals
  for (int i = 0; i < mesh.n_nodes(); ++i)
    u.set_node(i, Vec3(0.3, 0.1, -0.2) + Vec3(-mesh.nodes[i][1], mesh.nodes[i][0], 0) * 1e-3);
  CHECK(evaluate_functional(mesh, u, mat, lcf) == doctest::Approx(0.0));
  CHECK(evaluate_functional(mesh, u, mat, cer) == doctest::Approx(0.0));

  // isotropic dilation: sigma = p I, every normal stress equals p, so
  // J_cer = |Omega| (p / sigma_0)^m ; the trace-free part vanishes so
  // the surface functional stays zero
  double alpha = 1e-4;
  for (int i = 0; i < mesh.n_nodes(); ++i) u.set_node(i, alpha * mesh.nodes[i]);
  double p = (3.0 * mat.lambda + 2.0 * mat.mu) * alpha;
  double expect = std::pow(p / mat.sigma_0, mat.m);
  CHECK(evaluate_functional(mesh, u, mat, cer) == doctest::Approx(expect).epsilon(1e-8));
  CHECK(evaluate_functional(mesh, u, mat, lcf) == doctest::Approx(0.0));
}

TEST_CASE("uniaxial strain ceramic value matches the density closed form") {
  MaterialParams mat = paper_material();
  mat.m = 2.0;
  mat.sigma_0 = 50.0;
  Mesh mesh = make_unit_cube(2);
  DisplacementField u;
  u.degree = 1;
  u.coeffs = VecX::Zero(3 * mesh.n_nodes());
  double alpha = 1e-4;
  for (int i = 0; i < mesh.n_nodes(); ++i) u.set_node(i, Vec3(alpha * mesh.nodes[i][0], 0, 0));
  CeramicDensity cer(mat);
  Mat3 sig = Mat3::Zero();
  sig(0, 0) = (mat.lambda + 2.0 * mat.mu) * alpha;
  sig(1, 1) = sig(2, 2) = mat.lambda * alpha;
  double expect = f_cer(sig, cer.quadrature(), mat.m, mat.sigma_0);
  CHECK(evaluate_functional(mesh, u, mat, cer) == doctest::Approx(expect).epsilon(1e-10));
}
