#pragma once

#include <functional>

#include "shapeopt/types.hpp"

namespace shapeopt {

// Shape-independent load data with space derivatives, as needed by the
// transport formulas f_V = Df V + f div(V), g_V = Dg V + g div_Gamma(V).
// Gradients default to zero (constant loads).
struct LoadSpec {
  std::function<Vec3(const Vec3&)> f;              // volume force, N/mm^3
  std::function<Mat3(const Vec3&)> Df;
  std::function<Vec3(const Vec3&, int tag)> g;     // traction by facet tag, MPa
  std::function<Mat3(const Vec3&, int tag)> Dg;

  Vec3 f_at(const Vec3& x) const { return f ? f(x) : Vec3::Zero(); }
  Mat3 Df_at(const Vec3& x) const { return Df ? Df(x) : Mat3::Zero(); }
  Vec3 g_at(const Vec3& x, int tag) const { return g ? g(x, tag) : Vec3::Zero(); }
  Mat3 Dg_at(const Vec3& x, int tag) const { return Dg ? Dg(x, tag) : Mat3::Zero(); }

  static LoadSpec constant(const Vec3& f_const, const Vec3& g_const, int g_tag = -1);
};

}  // namespace shapeopt
