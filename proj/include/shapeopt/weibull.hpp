#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapeopt/types.hpp"

namespace shapeopt {

// Counter-based generator: a pure function of (seed, counter), so streams
// split deterministically and sampling is reproducible by construction.
struct CounterRng {
  uint64_t seed = 0;
  uint64_t counter = 0;

  explicit CounterRng(uint64_t s) : seed(s) {}
  uint64_t next_u64();
  double next_uniform();            // in (0, 1)
  CounterRng split(uint64_t tag) const;
};

struct WeibullModel {
  double eta = 1.0;  // scale, cycles
  double m = 1.0;    // shape

  WeibullModel(double eta_, double m_);
  double cdf(double s) const;       // F(s) = 1 - exp(-(s/eta)^m), 0 for s < 0
  double hazard(double s) const;    // (m/eta)(s/eta)^{m-1}, 0 for s < 0
  double cumulative_hazard(double s) const;  // (s/eta)^m
  double quantile(double p) const;  // eta (-ln(1-p))^{1/m}; p in [0,1)
};

// eta = J^{-1/m}; the bridge from functional values to failure statistics.
double eta_from_j(double j, double m);

// Crack process with intensity rho(C_s) = s^m * J.
struct CrackProcess {
  double intensity_j = 0.0;  // functional value J, 1/cycles^m
  double m = 1.0;
  uint64_t rng_seed = 0;

  WeibullModel first_failure_model() const { return {eta_from_j(intensity_j, m), m}; }
};

// i.i.d. first-failure times by inverse-CDF sampling; reproducible per seed.
std::vector<double> sample_first_failure(const CrackProcess& process, int n_samples);

// Poisson crack counts in [0, s] with mean s^m * J.
std::vector<int> sample_crack_counts(const CrackProcess& process, double s, int n_samples);

// Two-sided Kolmogorov-Smirnov statistic of samples against the model CDF.
double ks_statistic(std::vector<double> samples, const WeibullModel& model);

struct HazardRow {
  std::string design;
  double j = 0.0;
  double eta = 0.0;
  double q05 = 0.0;
  double q632 = 0.0;
  std::vector<double> cdf_at_probe;
  std::vector<double> hazard_at_probe;
  int rank = 0;  // 1 = most reliable (smallest J)
};

// Per-design reliability table; lower J ranks as more reliable at every
// probe time.
std::vector<HazardRow> hazard_report(const std::vector<std::pair<std::string, double>>& j_values,
                                     double m, const std::vector<double>& probe_times);

std::string hazard_report_csv(const std::vector<HazardRow>& rows,
                              const std::vector<double>& probe_times);

}  // namespace shapeopt
