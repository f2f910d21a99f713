#include "shapeopt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "shapeopt/gmsh_io.hpp"

namespace shapeopt {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Vec3 parse_vec3(const std::string& v, const std::string& key) {
  std::istringstream ss(v);
  Vec3 out;
  char comma;
  if (!(ss >> out[0] >> comma >> out[1] >> comma >> out[2]))
    throw ConfigError("expected comma triple for key " + key);
  return out;
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    size_t pos;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("bad numeric value for key " + key + ": " + v);
  }
}

int parse_int(const std::string& v, const std::string& key) {
  double x = parse_num(v, key);
  if (x != std::floor(x)) throw ConfigError("expected integer for key " + key);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected boolean for key " + key);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  double E = 70000.0, nu = 0.3;
  bool material_given = false;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("bad section header at line " + std::to_string(lineno));
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::string full = section + "." + key;

    if (full == "mesh.path") cfg.mesh_path = val;
    else if (full == "mesh.generator") cfg.generator = val;
    else if (full == "mesh.length") cfg.rod.length = parse_num(val, full);
    else if (full == "mesh.height") cfg.rod.height = parse_num(val, full);
    else if (full == "mesh.diameter") cfg.rod.diameter = parse_num(val, full);
    else if (full == "mesh.segments") cfg.rod.n_segments = parse_int(val, full);
    else if (full == "mesh.rings") cfg.rod.n_rings = parse_int(val, full);
    else if (full == "mesh.n") cfg.cube_n = parse_int(val, full);
    else if (full == "mesh.radius") cfg.icosphere_radius = parse_num(val, full);
    else if (full == "mesh.subdivisions") cfg.icosphere_subdivisions = parse_int(val, full);
    else if (full == "mesh.refine") cfg.refine = parse_int(val, full);
    else if (full == "mesh.degree") cfg.degree = parse_int(val, full);
    else if (full == "mesh.dirichlet_tags" || full == "mesh.neumann_tags") {
      std::istringstream ts(val);
      std::string tok;
      while (std::getline(ts, tok, ','))
        cfg.tag_roles[parse_int(trim(tok), full)] =
            (key == "dirichlet_tags") ? BoundaryRole::DIRICHLET : BoundaryRole::NEUMANN;
    } else if (full == "material.E") { E = parse_num(val, full); material_given = true; }
    else if (full == "material.nu") { nu = parse_num(val, full); material_given = true; }
    else if (full == "material.K") cfg.material.K = parse_num(val, full);
    else if (full == "material.n_hat") cfg.material.n_hat = parse_num(val, full);
    else if (full == "material.sigma_f_prime") cfg.material.sigma_f_prime = parse_num(val, full);
    else if (full == "material.eps_f_prime") cfg.material.eps_f_prime = parse_num(val, full);
    else if (full == "material.b") cfg.material.b = parse_num(val, full);
    else if (full == "material.c") cfg.material.c = parse_num(val, full);
    else if (full == "material.m") cfg.material.m = parse_num(val, full);
    else if (full == "material.sigma_0") cfg.material.sigma_0 = parse_num(val, full);
    else if (full == "load.f") cfg.f_const = parse_vec3(val, full);
    else if (full == "load.g") cfg.g_const = parse_vec3(val, full);
    else if (full == "load.g_tag") cfg.g_tag = parse_int(val, full);
    else if (full == "load.g_total_force") cfg.g_follows_area = parse_bool(val, full);
    else if (full == "functional.kind") cfg.functional = val;
    else if (full == "functional.all_boundary") cfg.functional_all_boundary = parse_bool(val, full);
    else if (full == "functional.sphere_points") cfg.sphere_quad_polar = parse_int(val, full);
    else if (full == "solver.tol") cfg.solver.tol = parse_num(val, full);
    else if (full == "solver.max_iter") cfg.solver.max_iter = parse_int(val, full);
    else if (full == "descent.method") {
      if (val == "l2") cfg.descent.method = DescentMethod::L2;
      else if (val == "helmholtz") cfg.descent.method = DescentMethod::HELMHOLTZ;
      else if (val == "volume") cfg.descent.method = DescentMethod::VOLUME_EXTENSION;
      else throw ConfigError("unknown descent method: " + val);
    }
    else if (full == "descent.c") cfg.descent.c = parse_num(val, full);
    else if (full == "descent.max_iters") cfg.descent.max_iters = parse_int(val, full);
    else if (full == "descent.step_cap") cfg.descent.step_cap = parse_num(val, full);
    else if (full == "descent.quality_floor") cfg.descent.quality_floor = parse_num(val, full);
    else if (full == "descent.grad_tol") cfg.descent.grad_tol = parse_num(val, full);
    else if (full == "descent.alpha0") cfg.descent.armijo.alpha0 = parse_num(val, full);
    else if (full == "descent.shrink") cfg.descent.armijo.shrink = parse_num(val, full);
    else if (full == "descent.c1") cfg.descent.armijo.c1 = parse_num(val, full);
    else if (full == "descent.max_backtracks") cfg.descent.armijo.max_backtracks = parse_int(val, full);
    else if (full == "descent.cutoff_layers") cfg.descent.cutoff_layers = parse_int(val, full);
    else if (full == "descent.frozen_tags") {
      std::istringstream ts(val);
      std::string tok;
      while (std::getline(ts, tok, ','))
        cfg.descent.frozen_tags.push_back(parse_int(trim(tok), full));
    }
    else if (full == "output.dir") cfg.out_dir = val;
    else if (full == "output.seed") cfg.seed = static_cast<uint64_t>(parse_num(val, full));
    else if (full == "output.deterministic") cfg.deterministic = parse_bool(val, full);
    else if (full == "ppp.samples") cfg.ppp_samples = parse_int(val, full);
    else if (full == "ppp.probe_s") cfg.ppp_probe_s = parse_num(val, full);
    else throw ConfigError("unknown config key: " + full);
  }
  if (material_given) {
    double K = cfg.material.K, n_hat = cfg.material.n_hat;
    double sf = cfg.material.sigma_f_prime, ef = cfg.material.eps_f_prime;
    double b = cfg.material.b, c = cfg.material.c, m = cfg.material.m, s0 = cfg.material.sigma_0;
    cfg.material = MaterialParams::from_E_nu(E, nu);
    cfg.material.K = K;
    cfg.material.n_hat = n_hat;
    cfg.material.sigma_f_prime = sf;
    cfg.material.eps_f_prime = ef;
    cfg.material.b = b;
    cfg.material.c = c;
    cfg.material.m = m;
    cfg.material.sigma_0 = s0;
  }
  cfg.material.check();
  if (cfg.degree != 1 && cfg.degree != 2) throw ConfigError("mesh degree must be 1 or 2");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Mesh RunConfig::build_mesh() const {
  Mesh m;
  if (!generator.empty()) {
    if (generator == "rod") m = make_bent_rod(rod);
    else if (generator == "cube") m = make_unit_cube(cube_n);
    else if (generator == "icosphere") m = make_icosphere_ball(icosphere_radius, icosphere_subdivisions);
    else throw ConfigError("unknown mesh generator: " + generator);
  } else if (!mesh_path.empty()) {
    m = read_gmsh(mesh_path, tag_roles);
  } else {
    throw ConfigError("config needs mesh.path or mesh.generator");
  }
  for (int k = 0; k < refine; ++k) m = refine_uniform(m);
  if (degree == 2) m = to_p2(m);
  return m;
}

StateProblem RunConfig::build_problem(Mesh mesh) const {
  StateProblem p;
  p.mat = material;
  Vec3 g = g_const;
  if (g_follows_area) {
    double area = 0.0;
    for (size_t fi = 0; fi < mesh.facets.size(); ++fi)
      if (g_tag < 0 || mesh.facets[fi].tag == g_tag)
        if (!mesh.is_dirichlet_facet(mesh.facets[fi])) area += mesh.facet_area(static_cast<int>(fi));
    if (area <= 0) throw ConfigError("total-force load with empty loaded surface");
    g /= area;
  }
  p.loads = LoadSpec::constant(f_const, g, g_tag);
  p.solver = solver;
  p.mesh = std::move(mesh);
  return p;
}

std::unique_ptr<LocalDensity> RunConfig::build_density() const {
  std::unique_ptr<LocalDensity> d;
  if (functional == "lcf") d = std::make_unique<LcfDensity>(material);
  else if (functional == "cer") d = std::make_unique<CeramicDensity>(material, sphere_quad_polar);
  else if (functional == "volume") d = std::make_unique<VolumeDensity>();
  else if (functional == "compliance") d = std::make_unique<ComplianceDensity>(material);
  else throw ConfigError("unknown functional: " + functional);
  d->include_dirichlet_boundary = functional_all_boundary;
  return d;
}

}  // namespace shapeopt
