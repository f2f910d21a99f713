#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "shapeopt/descent.hpp"
#include "shapeopt/primitives.hpp"
#include "shapeopt/shape_derivative.hpp"

namespace shapeopt {

// Flat INI-style run configuration: `[section]` headers and `key = value`
// lines, vectors as comma triples. Unknown keys are errors.
struct RunConfig {
  // mesh: either a file or a named generator
  std::string mesh_path;
  std::string generator;           // rod | cube | icosphere | (empty: use path)
  RodParams rod;
  int cube_n = 4;
  double icosphere_radius = 1.0;
  int icosphere_subdivisions = 3;
  int refine = 0;
  int degree = 1;                  // 1 or 2
  std::map<int, BoundaryRole> tag_roles;

  MaterialParams material = MaterialParams::from_E_nu(70000.0, 0.3);

  Vec3 f_const = Vec3::Zero();
  Vec3 g_const = Vec3::Zero();
  int g_tag = -1;                  // -1: all Neumann facets
  bool g_follows_area = false;     // interpret g as total force / loaded area

  std::string functional = "lcf";  // lcf | cer | volume | compliance
  bool functional_all_boundary = false;
  int sphere_quad_polar = 24;

  SolveOptions solver;
  DescentConfig descent;

  std::string out_dir = "out";
  uint64_t seed = 0;
  bool deterministic = true;

  // ppp subcommand
  int ppp_samples = 200000;
  double ppp_probe_s = 0.0;

  Mesh build_mesh() const;
  StateProblem build_problem(Mesh mesh) const;
  std::unique_ptr<LocalDensity> build_density() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace shapeopt
