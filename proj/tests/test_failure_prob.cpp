#include <doctest.h>

#include <cmath>

#include "shapeopt/weibull.hpp"

using namespace shapeopt;

TEST_CASE("weibull closed forms") {
  WeibullModel w(287024.0, 2.0);
  CHECK(w.cdf(w.eta) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
  CHECK(w.cdf(-5.0) == 0.0);
  CHECK(w.hazard(-1.0) == 0.0);
  CHECK(w.quantile(0.0) == 0.0);
  CHECK_THROWS_AS(w.quantile(1.0), NumericError);

  // quantile/cdf round trip
  for (double p : {0.05, 0.5, 0.632, 0.99}) {
    CHECK(w.cdf(w.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("cumulative hazard equals the numerical hazard integral") {
  WeibullModel w(3.5, 1.7);
  double s = 5.0;
  // composite Simpson on [0, s]
  int n = 20000;
  double h = s / n, acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = i * h, b = a + h;
    acc += h / 6.0 * (w.hazard(a) + 4.0 * w.hazard(0.5 * (a + b)) + w.hazard(b));
  }
  CHECK(acc == doctest::Approx(w.cumulative_hazard(s)).epsilon(1e-8));
}

TEST_CASE("eta bridge reproduces the reference designs") {
  CHECK(eta_from_j(1.0, 3.7) == doctest::Approx(1.0));
  double eta1 = eta_from_j(1.2138e-11, 2.0);
  CHECK(eta1 == doctest::Approx(287024.0).epsilon(5e-4));  // 4 significant digits
  double eta2 = eta_from_j(4.35948e-11, 2.0);
  CHECK(std::abs(eta2 - 151454.0) <= 1.0);
  CHECK_THROWS_AS(eta_from_j(0.0, 2.0), NumericError);

  WeibullModel w1(eta1, 2.0);
  CHECK(w1.quantile(0.05) == doctest::Approx(65005.0).epsilon(1e-3));
}

TEST_CASE("counter rng: determinism and splitting") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c = CounterRng(42).split(7);
  CounterRng d(42);
  CHECK(c.next_u64() != d.next_u64());
  // uniforms stay inside (0,1)
  CounterRng e(3);
  for (int i = 0; i < 1000; ++i) {
    double u = e.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("first-failure sampling: determinism, mean, KS") {
  CrackProcess proc;
  proc.m = 1.0;
  proc.intensity_j = 1.0;  // eta = 1, exponential distribution
  proc.rng_seed = 2024;
  auto t1 = sample_first_failure(proc, 200000);
  auto t2 = sample_first_failure(proc, 200000);
  CHECK(t1 == t2);

  double mean = 0.0;
  for (double x : t1) mean += x;
  mean /= t1.size();
  CHECK(mean == doctest::Approx(1.0).epsilon(0.01));

  CHECK(ks_statistic(t1, proc.first_failure_model()) <= 0.005);
}

TEST_CASE("crack counts: zero time, Poisson mean, survival fraction") {
  CrackProcess proc;
  proc.m = 2.0;
  proc.intensity_j = 3.0;  // rho(s) = 3 s^2
  proc.rng_seed = 99;
  auto zero = sample_crack_counts(proc, 0.0, 1000);
  for (int c : zero) CHECK(c == 0);

  double s = 1.0;  // rho = 3
  auto counts = sample_crack_counts(proc, s, 200000);
  double mean = 0.0, zero_frac = 0.0;
  for (int c : counts) {
    mean += c;
    if (c == 0) zero_frac += 1.0;
  }
  mean /= counts.size();
  zero_frac /= counts.size();
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(zero_frac == doctest::Approx(std::exp(-3.0)).epsilon(0.01));

  // consistency with the first-failure law: P(T <= s) = 1 - P(count = 0)
  WeibullModel w = proc.first_failure_model();
  CHECK(1.0 - zero_frac == doctest::Approx(w.cdf(s)).epsilon(0.01));
}

TEST_CASE("hazard report ranks by J and reproduces the reference rows") {
  std::vector<std::pair<std::string, double>> designs = {
      {"omega1", 1.2138e-11}, {"omega2", 4.35948e-11}};
  auto rows = hazard_report(designs, 2.0, {1e5, 3e5});
  CHECK(rows[0].rank == 1);
  CHECK(rows[1].rank == 2);
  CHECK(rows[0].eta == doctest::Approx(287024.0).epsilon(5e-4));
  CHECK(std::abs(rows[1].eta - 151454.0) <= 1.0);
  // more reliable design has lower cdf and hazard at every probe time
  for (size_t k = 0; k < 2; ++k) {
    CHECK(rows[0].cdf_at_probe[k] < rows[1].cdf_at_probe[k]);
    CHECK(rows[0].hazard_at_probe[k] < rows[1].hazard_at_probe[k]);
  }

  auto equal_rows = hazard_report({{"a", 5e-11}, {"b", 5e-11}}, 2.0, {1e5});
  CHECK(equal_rows[0].eta == equal_rows[1].eta);
  CHECK(equal_rows[0].cdf_at_probe[0] == equal_rows[1].cdf_at_probe[0]);

  std::string csv = hazard_report_csv(rows, {1e5, 3e5});
  CHECK(csv.find("omega1") != std::string::npos);
  CHECK(csv.find("eta") != std::string::npos);
}
