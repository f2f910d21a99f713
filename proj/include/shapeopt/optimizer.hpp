#pragma once

#include <optional>
#include <string>

#include "shapeopt/descent.hpp"
#include "shapeopt/shape_derivative.hpp"
#include "shapeopt/weibull.hpp"

namespace shapeopt {

struct IterationRecord {
  int iter = 0;
  double j = 0.0;
  double grad_norm = 0.0;   // ||G||_L2(Gamma_N)
  double step = 0.0;        // accepted Armijo step (0 if rejected/terminal)
  double dj_w = 0.0;        // directional derivative along the step
  double min_quality = 0.0;
  double eta = 0.0;
  double q05 = 0.0;
  bool accepted = false;
};

struct OptimizationTrace {
  std::vector<IterationRecord> rows;
  std::string stop_reason;
  Mesh final_mesh;
};

struct OptimizeCallbacks {
  // invoked after each accepted iterate (snapshot export etc.)
  std::function<void(int iter, const Mesh&, const DisplacementField&)> on_accept;
};

OptimizationTrace optimize(const StateProblem& problem, const LocalDensity& density,
                           const DescentConfig& cfg, const OptimizeCallbacks& cb = {});

std::string trace_csv(const OptimizationTrace& trace);

}  // namespace shapeopt
