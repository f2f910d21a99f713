#include "shapeopt/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace shapeopt {

namespace {

double gradient_l2_norm(const Mesh& mesh, const ShapeGradientDensity& G) {
  double acc = 0.0;
  for (size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const Facet& f = mesh.facets[fi];
    if (mesh.is_dirichlet_facet(f)) continue;
    double area = mesh.facet_area(static_cast<int>(fi));
    for (int k = 0; k < 3; ++k) {
      auto it = G.values.find(f.nodes[k]);
      if (it != G.values.end()) acc += area / 3.0 * it->second * it->second;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

OptimizationTrace optimize(const StateProblem& problem, const LocalDensity& density,
                           const DescentConfig& cfg, const OptimizeCallbacks& cb) {
  OptimizationTrace trace;
  Mesh mesh = problem.mesh;
  double step_cap = cfg.step_cap > 0 ? cfg.step_cap : 0.5 * mean_edge_length(mesh);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    IterationRecord rec;
    rec.iter = iter;

    LinearSystem sys = assemble_elasticity(mesh, problem.mat);
    VecX rhs = assemble_load(
        mesh, problem.loads.f ? VolumeLoad([&](const Vec3& x) { return problem.loads.f_at(x); })
                              : VolumeLoad(),
        problem.loads.g
            ? SurfaceLoad([&](const Vec3& x, int tag) { return problem.loads.g_at(x, tag); })
            : SurfaceLoad());
    apply_dirichlet(mesh, sys, rhs, nullptr);
    DisplacementField u = solve(mesh, sys, rhs, problem.solver);
    double j = evaluate_functional(mesh, u, problem.mat, density);
    rec.j = j;
    if (j > 0 && problem.mat.m > 0) {
      rec.eta = eta_from_j(j, problem.mat.m);
      rec.q05 = WeibullModel(rec.eta, problem.mat.m).quantile(0.05);
    }
    rec.min_quality = quality(mesh).min_volume_ratio;

    SurfaceGeometry geom = surface_geometry(mesh);
    SurfaceOperator ops = tangential_ops(mesh, geom);
    BoundaryStress bstress = boundary_stress(mesh, u, problem.mat, geom);
    AdjointSpec spec;
    spec.density = &density;
    spec.mode = density.kind() == FunctionalKind::SURFACE_SIGMA ? AdjointRhsMode::WEAK_STOKES
                                                                : AdjointRhsMode::DIRECT;
    DisplacementField p =
        solve_adjoint(mesh, sys, u, problem.mat, spec, &geom, &ops, &bstress, problem.solver);
    ShapeGradientDensity G =
        hadamard_density(mesh, u, p, problem.mat, problem.loads, spec, geom, ops, bstress);
    rec.grad_norm = gradient_l2_norm(mesh, G);

    if (cfg.grad_tol > 0 && rec.grad_norm <= cfg.grad_tol) {
      rec.accepted = false;
      trace.rows.push_back(rec);
      trace.stop_reason = "gradient norm below tolerance";
      break;
    }
    if (rec.min_quality < cfg.quality_floor) {
      rec.accepted = false;
      trace.rows.push_back(rec);
      trace.stop_reason = "mesh quality below floor";
      break;
    }
    if (rec.grad_norm == 0.0) {
      rec.accepted = false;
      trace.rows.push_back(rec);
      trace.stop_reason = "zero gradient";
      break;
    }

    // descent direction on the boundary, then extended into the volume
    std::map<int, Vec3> Wb;
    DisplacementField Wvol;
    Wvol.degree = mesh.degree;
    Wvol.coeffs = VecX::Zero(3 * mesh.n_nodes());
    if (cfg.method == DescentMethod::VOLUME_EXTENSION) {
      VecX lj = distributed_dj_functional(mesh, u, p, problem.mat, problem.loads, density);
      Wvol = volume_extension_direction(mesh, lj, cfg, problem.solver);
      // admissibility: taper the band around the Dirichlet surface
      auto cut = dirichlet_cutoff(mesh, cfg);
      for (const auto& [v, s] : cut) Wvol.set_node(v, s * Wvol.at_node(v));
    } else {
      if (cfg.method == DescentMethod::L2) {
        Wb = l2_direction(mesh, G, geom, cfg);
      } else {
        double c = cfg.c >= 0 ? cfg.c : std::pow(2.0 * mean_edge_length(mesh), 2);
        Wb = helmholtz_direction(mesh, G, geom, ops, c, cfg);
      }
      std::vector<Vec3> ext = extend_to_volume(mesh, problem.mat, Wb, problem.solver);
      for (int i = 0; i < mesh.n_nodes(); ++i) Wvol.set_node(i, ext[i]);
    }

    // directional derivative through the gradient pairing
    VelocityField vw = VelocityField::from_nodal(mesh, Wvol, true);
    double djw = dj_from_gradient(mesh, geom, G, vw);
    rec.dj_w = djw;
    if (djw >= 0) {
      rec.accepted = false;
      trace.rows.push_back(rec);
      trace.stop_reason = "no descent direction";
      break;
    }

    double wmax = 0.0;
    for (int i = 0; i < mesh.n_vertices; ++i) wmax = std::max(wmax, Wvol.at_node(i).norm());
    double alpha = (wmax > 0) ? step_cap / wmax : 0.0;

    bool accepted = false;
    for (int bt = 0; bt <= cfg.armijo.max_backtracks; ++bt) {
      std::vector<Vec3> disp(mesh.n_vertices);
      for (int i = 0; i < mesh.n_vertices; ++i) disp[i] = Wvol.at_node(i);
      Mesh trial;
      try {
        trial = deform(mesh, disp, alpha);
      } catch (const MeshError&) {
        alpha *= cfg.armijo.shrink;  // inverted cell: reject, shrink
        continue;
      }
      if (quality(trial).min_volume_ratio < cfg.quality_floor) {
        alpha *= cfg.armijo.shrink;
        continue;
      }
      double j_trial = problem.value(trial, density);
      if (j_trial <= j + cfg.armijo.c1 * alpha * djw) {
        mesh = std::move(trial);
        rec.step = alpha;
        rec.accepted = true;
        accepted = true;
        break;
      }
      alpha *= cfg.armijo.shrink;
    }
    trace.rows.push_back(rec);
    if (!accepted) {
      trace.stop_reason = "line search exhausted";
      break;
    }
    if (cb.on_accept) cb.on_accept(iter, mesh, u);
  }
  if (trace.stop_reason.empty()) trace.stop_reason = "max iterations";
  trace.final_mesh = std::move(mesh);
  return trace;
}

std::string trace_csv(const OptimizationTrace& trace) {
  std::ostringstream os;
  os << "iter,J,grad_norm,step,dJ_W,min_quality,eta,q05,accepted\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return std::string(buf);
  };
  for (const auto& r : trace.rows)
    os << r.iter << ',' << num(r.j) << ',' << num(r.grad_norm) << ',' << num(r.step) << ','
       << num(r.dj_w) << ',' << num(r.min_quality) << ',' << num(r.eta) << ',' << num(r.q05)
       << ',' << (r.accepted ? 1 : 0) << "\n";
  os << "# stop: " << trace.stop_reason << "\n";
  return os.str();
}

}  // namespace shapeopt
