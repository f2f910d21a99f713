// Command-line front end: state solves, functional evaluation, shape
// gradients with FD cross-checks, failure statistics, and the descent loop.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "shapeopt/adjoint.hpp"
#include "shapeopt/config.hpp"
#include "shapeopt/gmsh_io.hpp"
#include "shapeopt/io_vtk.hpp"
#include "shapeopt/optimizer.hpp"
#include "shapeopt/weibull.hpp"

namespace fs = std::filesystem;
using namespace shapeopt;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  bool deterministic = false;
  int refine = -1;
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = parse_config(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.seed_set) cfg.seed = args.seed;
  if (args.deterministic) cfg.deterministic = true;
  if (args.refine >= 0) cfg.refine = args.refine;
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::map<int, double> von_mises_nodal(const Mesh& mesh, const DisplacementField& u,
                                      const MaterialParams& mat) {
  StressField s = stress(mesh, u, mat);
  std::vector<double> acc(mesh.n_nodes(), 0.0), w(mesh.n_nodes(), 0.0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Mat3 dev = LcfChain::tf(s.cell_stress[c]);
    double vm = LcfChain::vm(dev);
    double vol = mesh.cell_volume(c);
    for (int a = 0; a < mesh.nodes_per_cell(); ++a) {
      acc[mesh.cells[c][a]] += vol * vm;
      w[mesh.cells[c][a]] += vol;
    }
  }
  std::map<int, double> out;
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (w[i] > 0) out[i] = acc[i] / w[i];
  return out;
}

VelocityField smooth_check_field(int which) {
  switch (which % 3) {
    case 0:
      return VelocityField::analytic(
          [](const Vec3& x) { return Vec3(0.1 * x[2] * x[2], 0.05 * x[0], 0.08 * x[1] * x[2]); },
          [](const Vec3& x) {
            Mat3 g = Mat3::Zero();
            g(0, 2) = 0.2 * x[2];
            g(1, 0) = 0.05;
            g(2, 1) = 0.08 * x[2];
            g(2, 2) = 0.08 * x[1];
            return g;
          });
    case 1:
      return VelocityField::analytic(
          [](const Vec3& x) {
            return Vec3(0.05 * std::sin(x[1]), 0.1 * x[2], 0.04 * x[0] * x[0]);
          },
          [](const Vec3& x) {
            Mat3 g = Mat3::Zero();
            g(0, 1) = 0.05 * std::cos(x[1]);
            g(1, 2) = 0.1;
            g(2, 0) = 0.08 * x[0];
            return g;
          });
    default:
      return VelocityField::analytic(
          [](const Vec3& x) { return Vec3(0.06 * x[0] * x[1], 0.03 * x[2], 0.07 * x[1]); },
          [](const Vec3& x) {
            Mat3 g = Mat3::Zero();
            g(0, 0) = 0.06 * x[1];
            g(0, 1) = 0.06 * x[0];
            g(1, 2) = 0.03;
            g(2, 1) = 0.07;
            return g;
          });
  }
}

int run_solve(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  StateProblem prob = cfg.build_problem(cfg.build_mesh());
  DisplacementField u = prob.solve_state(prob.mesh);
  VtkFields fields;
  fields.add_vector("displacement", u);
  std::map<int, double> vm = von_mises_nodal(prob.mesh, u, prob.mat);
  fields.add_scalar("von_mises", prob.mesh, vm);
  write_vtk(cfg.out_dir + "/solution.vtk", prob.mesh, fields);
  std::cout << "wrote " << cfg.out_dir << "/solution.vtk\n";
  return 0;
}

int run_eval(const CommonArgs& args, double inject_j) {
  RunConfig cfg = load_config(args);
  double j;
  if (inject_j > 0) {
    j = inject_j;
  } else {
    StateProblem prob = cfg.build_problem(cfg.build_mesh());
    auto density = cfg.build_density();
    DisplacementField u = prob.solve_state(prob.mesh);
    j = evaluate_functional(prob.mesh, u, prob.mat, *density);
  }
  std::cout << "J = " << j << "\n";
  if (j > 0) {
    auto rows = hazard_report({{"design", j}}, cfg.material.m, {});
    std::cout << "eta = " << rows[0].eta << "\nq05 = " << rows[0].q05
              << "\nq632 = " << rows[0].q632 << "\n";
    std::ofstream out(cfg.out_dir + "/eval.csv");
    out << hazard_report_csv(rows, {});
  } else {
    std::cout << "eta = inf (zero crack intensity)\n";
  }
  return 0;
}

int run_grad(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  StateProblem prob = cfg.build_problem(cfg.build_mesh());
  auto density = cfg.build_density();
  LinearSystem sys = assemble_elasticity(prob.mesh, prob.mat);
  VecX rhs = assemble_load(
      prob.mesh, [&](const Vec3& x) { return prob.loads.f_at(x); },
      [&](const Vec3& x, int tag) { return prob.loads.g_at(x, tag); });
  apply_dirichlet(prob.mesh, sys, rhs, nullptr);
  DisplacementField u = solve(prob.mesh, sys, rhs, prob.solver);
  SurfaceGeometry geom = surface_geometry(prob.mesh);
  SurfaceOperator ops = tangential_ops(prob.mesh, geom);
  BoundaryStress bstress = boundary_stress(prob.mesh, u, prob.mat, geom);
  AdjointSpec spec;
  spec.density = density.get();
  spec.mode = density->kind() == FunctionalKind::SURFACE_SIGMA ? AdjointRhsMode::WEAK_STOKES
                                                               : AdjointRhsMode::DIRECT;
  DisplacementField p =
      solve_adjoint(prob.mesh, sys, u, prob.mat, spec, &geom, &ops, &bstress, prob.solver);
  ShapeGradientDensity G =
      hadamard_density(prob.mesh, u, p, prob.mat, prob.loads, spec, geom, ops, bstress);
  VtkFields fields;
  fields.add_scalar("shape_gradient", prob.mesh, G.values);
  fields.add_vector("adjoint", p);
  write_vtk(cfg.out_dir + "/gradient.vtk", prob.mesh, fields);
  std::ofstream table(cfg.out_dir + "/dj_table.csv");
  table << "field,dJ_gradient\n";
  for (int k = 0; k < 3; ++k) {
    VelocityField V = smooth_check_field(k);
    table << "V" << k << "," << dj_from_gradient(prob.mesh, geom, G, V) << "\n";
  }
  std::cout << "wrote " << cfg.out_dir << "/gradient.vtk and dj_table.csv\n";
  return 0;
}

int run_check(const CommonArgs& args, double fd_t, double tol) {
  RunConfig cfg = load_config(args);
  StateProblem prob = cfg.build_problem(cfg.build_mesh());
  auto density = cfg.build_density();
  LinearSystem sys = assemble_elasticity(prob.mesh, prob.mat);
  VecX rhs = assemble_load(
      prob.mesh, [&](const Vec3& x) { return prob.loads.f_at(x); },
      [&](const Vec3& x, int tag) { return prob.loads.g_at(x, tag); });
  apply_dirichlet(prob.mesh, sys, rhs, nullptr);
  DisplacementField u = solve(prob.mesh, sys, rhs, prob.solver);
  SurfaceGeometry geom = surface_geometry(prob.mesh);
  SurfaceOperator ops = tangential_ops(prob.mesh, geom);
  BoundaryStress bstress = boundary_stress(prob.mesh, u, prob.mat, geom);
  AdjointSpec spec;
  spec.density = density.get();
  spec.mode = density->kind() == FunctionalKind::SURFACE_SIGMA ? AdjointRhsMode::WEAK_STOKES
                                                               : AdjointRhsMode::DIRECT;
  DisplacementField p =
      solve_adjoint(prob.mesh, sys, u, prob.mat, spec, &geom, &ops, &bstress, prob.solver);
  ShapeGradientDensity G =
      hadamard_density(prob.mesh, u, p, prob.mat, prob.loads, spec, geom, ops, bstress);

  std::ofstream csv(cfg.out_dir + "/check.csv");
  csv << "field,t,fd,adjoint,rel_error,slope,pass\n";
  bool all_pass = true;
  for (int k = 0; k < 3; ++k) {
    VelocityField V = smooth_check_field(k);
    FdResult fd = fd_shape_derivative(prob, *density, V, fd_t);
    double dj = dj_from_gradient(prob.mesh, geom, G, V);
    double rel = std::abs(dj - fd.richardson) / std::max(1e-30, std::abs(fd.richardson));
    bool pass = rel <= tol;
    all_pass = all_pass && pass;
    csv << "V" << k << ',' << fd_t << ',' << fd.richardson << ',' << dj << ',' << rel << ','
        << fd.slope << ',' << (pass ? "PASS" : "FAIL") << "\n";
    std::cout << (pass ? "PASS" : "FAIL") << " V" << k << ": adjoint " << dj << " vs FD "
              << fd.richardson << " (rel " << rel << ", slope " << fd.slope << ")\n";
  }
  return all_pass ? 0 : 5;
}

int run_ppp(const CommonArgs& args, double inject_j) {
  RunConfig cfg = load_config(args);
  double j = inject_j;
  if (j <= 0) {
    StateProblem prob = cfg.build_problem(cfg.build_mesh());
    auto density = cfg.build_density();
    DisplacementField u = prob.solve_state(prob.mesh);
    j = evaluate_functional(prob.mesh, u, prob.mat, *density);
  }
  if (j <= 0) {
    std::cout << "zero crack intensity; nothing to sample\n";
    return 0;
  }
  CrackProcess proc;
  proc.intensity_j = j;
  proc.m = cfg.material.m;
  proc.rng_seed = cfg.seed;
  WeibullModel model = proc.first_failure_model();
  auto t = sample_first_failure(proc, cfg.ppp_samples);
  double ks = ks_statistic(t, model);
  double mean = 0.0;
  for (double x : t) mean += x;
  mean /= t.size();
  double probe = cfg.ppp_probe_s > 0 ? cfg.ppp_probe_s : model.eta;
  auto counts = sample_crack_counts(proc, probe, cfg.ppp_samples);
  double zero_frac = 0.0, cmean = 0.0;
  for (int c : counts) {
    if (c == 0) zero_frac += 1.0;
    cmean += c;
  }
  zero_frac /= counts.size();
  cmean /= counts.size();
  std::ofstream out(cfg.out_dir + "/ppp.csv");
  out << "J,eta,m,seed,n,ks,mean_T,probe_s,mean_count,zero_fraction,exp_minus_rho\n";
  out << j << ',' << model.eta << ',' << proc.m << ',' << proc.rng_seed << ',' << cfg.ppp_samples
      << ',' << ks << ',' << mean << ',' << probe << ',' << cmean << ',' << zero_frac << ','
      << std::exp(-model.cumulative_hazard(probe)) << "\n";
  std::cout << "eta = " << model.eta << ", KS = " << ks << ", P(count=0) = " << zero_frac
            << " vs exp(-rho) = " << std::exp(-model.cumulative_hazard(probe)) << "\n";
  return 0;
}

int run_optimize(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  StateProblem prob = cfg.build_problem(cfg.build_mesh());
  auto density = cfg.build_density();
  OptimizeCallbacks cb;
  cb.on_accept = [&cfg, &prob](int iter, const Mesh& mesh, const DisplacementField& u) {
    VtkFields fields;
    fields.add_vector("displacement", u);
    write_vtk(cfg.out_dir + "/iterate_" + std::to_string(iter) + ".vtk", mesh, fields);
    (void)prob;
  };
  OptimizationTrace trace = optimize(prob, *density, cfg.descent, cb);
  std::ofstream out(cfg.out_dir + "/trace.csv");
  out << trace_csv(trace);
  write_vtk(cfg.out_dir + "/final.vtk", trace.final_mesh);
  std::cout << trace_csv(trace);
  return 0;
}

int run_rodgen(const CommonArgs& args, const std::string& out_path) {
  RunConfig cfg = load_config(args);
  Mesh rod = make_bent_rod(cfg.rod);
  std::string path = out_path.empty() ? cfg.out_dir + "/rod.msh" : out_path;
  write_gmsh(path, rod);
  std::cout << "wrote " << path << " (" << rod.n_vertices << " vertices, " << rod.n_cells()
            << " cells)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape-reliability toolkit"};
  app.require_subcommand(1);
  CommonArgs args;

  double inject_j = 0.0, fd_t = 2e-3, check_tol = 0.05;
  std::string rod_out;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "run configuration (INI)")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed")->each([&](const std::string&) {
      args.seed_set = true;
    });
    cmd->add_flag("--deterministic", args.deterministic, "force ordered reductions");
    cmd->add_option("--refine", args.refine, "uniform refinement levels");
  };

  auto* solve_cmd = app.add_subcommand("solve", "state solve with VTK output");
  add_common(solve_cmd);
  auto* eval_cmd = app.add_subcommand("eval", "evaluate J, eta, quantiles");
  add_common(eval_cmd);
  eval_cmd->add_option("--inject-j", inject_j, "skip the solve and report for a given J");
  auto* grad_cmd = app.add_subcommand("grad", "shape gradient density and dJ table");
  add_common(grad_cmd);
  auto* check_cmd = app.add_subcommand("check", "FD-vs-adjoint gradient check");
  add_common(check_cmd);
  check_cmd->add_option("--fd-t", fd_t, "FD step");
  check_cmd->add_option("--tol", check_tol, "pass/fail relative tolerance");
  auto* ppp_cmd = app.add_subcommand("ppp", "Monte Carlo failure statistics");
  add_common(ppp_cmd);
  ppp_cmd->add_option("--inject-j", inject_j, "use a given J instead of solving");
  auto* opt_cmd = app.add_subcommand("optimize", "descent loop with trace");
  add_common(opt_cmd);
  auto* rod_cmd = app.add_subcommand("rodgen", "write the parametric bent rod as MSH 2.2");
  add_common(rod_cmd);
  rod_cmd->add_option("--mesh-out", rod_out, "output .msh path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(args);
    if (eval_cmd->parsed()) return run_eval(args, inject_j);
    if (grad_cmd->parsed()) return run_grad(args);
    if (check_cmd->parsed()) return run_check(args, fd_t, check_tol);
    if (ppp_cmd->parsed()) return run_ppp(args, inject_j);
    if (opt_cmd->parsed()) return run_optimize(args);
    if (rod_cmd->parsed()) return run_rodgen(args, rod_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
