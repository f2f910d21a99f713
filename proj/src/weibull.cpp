#include "shapeopt/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shapeopt {

namespace {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t CounterRng::next_u64() { return splitmix64(seed ^ splitmix64(counter++)); }

double CounterRng::next_uniform() {
  // 53-bit mantissa, strictly inside (0,1)
  double u = (next_u64() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

CounterRng CounterRng::split(uint64_t tag) const {
  return CounterRng(splitmix64(seed ^ splitmix64(~tag)));
}

WeibullModel::WeibullModel(double eta_, double m_) : eta(eta_), m(m_) {
  if (eta <= 0 || m <= 0) throw NumericError("Weibull parameters must be positive");
}

double WeibullModel::cdf(double s) const {
  if (s < 0) return 0.0;
  return 1.0 - std::exp(-std::pow(s / eta, m));
}

double WeibullModel::hazard(double s) const {
  if (s < 0) return 0.0;
  return m / eta * std::pow(s / eta, m - 1.0);
}

double WeibullModel::cumulative_hazard(double s) const {
  if (s < 0) return 0.0;
  return std::pow(s / eta, m);
}

double WeibullModel::quantile(double p) const {
  if (p < 0 || p >= 1) throw NumericError("quantile needs p in [0,1)");
  return eta * std::pow(-std::log1p(-p), 1.0 / m);
}

double eta_from_j(double j, double m) {
  if (j <= 0) throw NumericError("eta_from_j needs a positive functional value");
  return std::pow(j, -1.0 / m);
}

std::vector<double> sample_first_failure(const CrackProcess& process, int n_samples) {
  WeibullModel model = process.first_failure_model();
  CounterRng rng(process.rng_seed);
  std::vector<double> t(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double u = rng.next_uniform();
    t[i] = model.eta * std::pow(-std::log(u), 1.0 / model.m);
  }
  return t;
}

std::vector<int> sample_crack_counts(const CrackProcess& process, double s, int n_samples) {
  if (s < 0) throw NumericError("crack counts need s >= 0");
  double rho = std::pow(s, process.m) * process.intensity_j;
  CounterRng rng(process.rng_seed);
  std::vector<int> counts(n_samples, 0);
  if (rho == 0.0) return counts;
  double limit = std::exp(-rho);
  for (int i = 0; i < n_samples; ++i) {
    // Knuth multiplication method; rho stays at desk scale here
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= rng.next_uniform();
    } while (p > limit && k < 100000);
    counts[i] = k - 1;
  }
  return counts;
}

double ks_statistic(std::vector<double> samples, const WeibullModel& model) {
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = model.cdf(samples[i]);
    d = std::max(d, (i + 1) / n - f);
    d = std::max(d, f - i / n);
  }
  return d;
}

std::vector<HazardRow> hazard_report(const std::vector<std::pair<std::string, double>>& j_values,
                                     double m, const std::vector<double>& probe_times) {
  std::vector<HazardRow> rows;
  for (const auto& [name, j] : j_values) {
    HazardRow r;
    r.design = name;
    r.j = j;
    r.eta = eta_from_j(j, m);
    WeibullModel model(r.eta, m);
    r.q05 = model.quantile(0.05);
    r.q632 = model.quantile(1.0 - std::exp(-1.0));
    for (double s : probe_times) {
      r.cdf_at_probe.push_back(model.cdf(s));
      r.hazard_at_probe.push_back(model.hazard(s));
    }
    rows.push_back(std::move(r));
  }
  // smaller J = larger eta = more reliable at every time
  std::vector<int> order(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&rows](int a, int b) { return rows[a].j < rows[b].j; });
  for (size_t r = 0; r < order.size(); ++r) rows[order[r]].rank = static_cast<int>(r) + 1;
  return rows;
}

std::string hazard_report_csv(const std::vector<HazardRow>& rows,
                              const std::vector<double>& probe_times) {
  std::ostringstream os;
  os << "design,J,eta,q05,q632,rank";
  for (double s : probe_times) os << ",F(" << s << "),h(" << s << ")";
  os << "\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.design << ',' << num(r.j) << ',' << num(r.eta) << ',' << num(r.q05) << ','
       << num(r.q632) << ',' << r.rank;
    for (size_t k = 0; k < probe_times.size(); ++k)
      os << ',' << num(r.cdf_at_probe[k]) << ',' << num(r.hazard_at_probe[k]);
    os << "\n";
  }
  return os.str();
}

}  // namespace shapeopt
