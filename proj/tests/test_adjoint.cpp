#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "shapeopt/adjoint.hpp"
#include "shapeopt/primitives.hpp"
#include "shapeopt/shape_derivative.hpp"

using namespace shapeopt;

namespace {

struct Cutoff {
  double a, b;
  double s(double x) const {
    double t = std::clamp((x - a) / (b - a), 0.0, 1.0);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
  }
  double ds(double x) const {
    double t = std::clamp((x - a) / (b - a), 0.0, 1.0);
    return 30.0 * t * t * (t - 1.0) * (t - 1.0) / (b - a);
  }
};

// random smooth admissible fields, cutoff near the clamp at x = 0
VelocityField random_admissible(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-0.1, 0.1);
  double c1 = coef(rng), c2 = coef(rng), c3 = coef(rng), c4 = coef(rng), c5 = coef(rng);
  Cutoff cut{0.3, 0.9};
  auto w = [=](const Vec3& x) {
    return Vec3(c1 * x[2] + c4 * x[1] * x[1], c2 + c5 * x[0], c3 * x[0] + c1);
  };
  auto dw = [=](const Vec3& x) {
    Mat3 g = Mat3::Zero();
    g(0, 1) = 2.0 * c4 * x[1];
    g(0, 2) = c1;
    g(1, 0) = c5;
    g(2, 0) = c3;
    return g;
  };
  return VelocityField::analytic(
      [cut, w](const Vec3& x) { return Vec3(cut.s(x[0]) * w(x)); },
      [cut, w, dw](const Vec3& x) {
        Mat3 g = cut.s(x[0]) * dw(x);
        g += cut.ds(x[0]) * w(x) * Vec3::UnitX().transpose();
        return Mat3(g);
      },
      true);
}

struct Setup {
  StateProblem prob;
  LinearSystem sys;
  DisplacementField u;
  SurfaceGeometry geom;
  SurfaceOperator ops;
  BoundaryStress bstress;
};

Setup cantilever_setup(int n, int degree, double m = 2.0, double sigma0 = 50.0) {
  Setup s;
  s.prob.mesh = make_box(2.0, 1.0, 1.0, 2 * n, n, n);
  if (degree == 2) s.prob.mesh = to_p2(s.prob.mesh);
  s.prob.mat = MaterialParams::from_E_nu(70000.0, 0.3);
  s.prob.mat.m = m;
  s.prob.mat.sigma_0 = sigma0;
  s.prob.loads = LoadSpec::constant(Vec3(0, 0, -0.02), Vec3(60.0, 0, 25.0), 2);
  s.prob.solver.tol = 1e-13;
  s.sys = assemble_elasticity(s.prob.mesh, s.prob.mat);
  VecX rhs = assemble_load(s.prob.mesh, [&](const Vec3& x) { return s.prob.loads.f_at(x); },
                           [&](const Vec3& x, int tag) { return s.prob.loads.g_at(x, tag); });
  apply_dirichlet(s.prob.mesh, s.sys, rhs, nullptr);
  s.u = solve(s.prob.mesh, s.sys, rhs, s.prob.solver);
  s.geom = surface_geometry(s.prob.mesh);
  s.ops = tangential_ops(s.prob.mesh, s.geom);
  s.bstress = boundary_stress(s.prob.mesh, s.u, s.prob.mat, s.geom);
  return s;
}

}  // namespace

TEST_CASE("constant densities have a zero adjoint state") {
  Setup s = cantilever_setup(1, 1);
  VolumeDensity vol;
  AdjointSpec spec{&vol, AdjointRhsMode::DIRECT};
  DisplacementField p = solve_adjoint(s.prob.mesh, s.sys, s.u, s.prob.mat, spec);
  CHECK(p.coeffs.norm() == 0.0);
}

TEST_CASE("stress-moment adjoint rhs matches an independent assembly") {
  Setup s = cantilever_setup(1, 1);
  Mat3 A;
  A << 1.0, 0.2, 0.0, 0.2, -0.5, 0.1, 0.0, 0.1, 0.3;
  StressMomentDensity dens(A);
  AdjointSpec spec{&dens, AdjointRhsMode::DIRECT};
  VecX rhs = assemble_adjoint_rhs(s.prob.mesh, s.u, s.prob.mat, spec);

  // independent path: int C : eps(test) dx with C = elastic_map(A) constant,
  // computed from per-cell P1 gradients without the fem assembly machinery
  Mat3 C = s.prob.mat.lambda * A.trace() * Mat3::Identity() +
           s.prob.mat.mu * (A + A.transpose());
  VecX expect = VecX::Zero(rhs.size());
  const Mesh& mesh = s.prob.mesh;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cl = mesh.cells[c];
    Mat3 J;
    J.col(0) = mesh.nodes[cl[1]] - mesh.nodes[cl[0]];
    J.col(1) = mesh.nodes[cl[2]] - mesh.nodes[cl[0]];
    J.col(2) = mesh.nodes[cl[3]] - mesh.nodes[cl[0]];
    double vol = J.determinant() / 6.0;
    Mat3 Jit = J.inverse().transpose();
    Vec3 g[4];
    g[1] = Jit.col(0);
    g[2] = Jit.col(1);
    g[3] = Jit.col(2);
    g[0] = -g[1] - g[2] - g[3];
    for (int a = 0; a < 4; ++a)
      expect.segment<3>(3 * cl[a]) += vol * (C * g[a]);
  }
  CHECK((rhs - expect).norm() <= 1e-10 * expect.norm());

  DisplacementField p = solve_adjoint(s.prob.mesh, s.sys, s.u, s.prob.mat, spec, nullptr,
                                      nullptr, nullptr, {.tol = 1e-13});
  VecX expect_bc = expect;
  for (int nd : s.sys.dirichlet_nodes) expect_bc.segment<3>(3 * nd).setZero();
  VecX p2 = cg_solve(s.sys.A, expect_bc, nullptr, 1e-13, 200000, "oracle adjoint");
  CHECK((p.coeffs - p2).norm() <= 1e-10 * p2.norm());
}

TEST_CASE("discrete adjoint identity for volume, compliance, ceramic, lcf") {
  Setup s = cantilever_setup(1, 2);
  CeramicDensity cer(s.prob.mat, 12);
  ComplianceDensity comp(s.prob.mat);
  LcfDensity lcf(s.prob.mat);
  std::vector<const LocalDensity*> densities = {&comp, &cer, &lcf};
  for (const LocalDensity* dens : densities) {
    AdjointSpec spec{dens, AdjointRhsMode::DIRECT};
    VecX lj = assemble_adjoint_rhs(s.prob.mesh, s.u, s.prob.mat, spec, &s.geom, &s.ops,
                                   &s.bstress);
    DisplacementField p = solve_adjoint(s.prob.mesh, s.sys, s.u, s.prob.mat, spec, &s.geom,
                                        &s.ops, &s.bstress, {.tol = 1e-13});
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
      VelocityField V = random_admissible(seed);
      DisplacementField udot =
          solve_material_derivative(s.prob.mesh, s.sys, s.u, s.prob.mat, s.prob.loads, V,
                                    {.tol = 1e-13});
      // lj(udot) vs Ldot(p) - Bdot(u, p)
      double lhs = lj.dot(udot.coeffs);
      VecX transport = assemble_ldot(s.prob.mesh, s.prob.loads, V) -
                       assemble_bdot_times_u(s.prob.mesh, s.prob.mat, s.u, V);
      double rhs = transport.dot(p.coeffs);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));

      // the three dJ paths agree to solver accuracy
      double dj_mat = dj_material_form(s.prob.mesh, s.u, udot, s.prob.mat, *dens, V);
      double dj_dist = distributed_shape_derivative(s.prob.mesh, s.u, p, s.prob.mat,
                                                    s.prob.loads, *dens, V);
      CHECK(dj_mat == doctest::Approx(dj_dist).epsilon(1e-8));
    }
  }
}

TEST_CASE("hadamard density of the volume functional is one") {
  StateProblem prob;
  prob.mesh = make_icosphere_ball(1.0, 2);
  prob.mat = MaterialParams::from_E_nu(70000.0, 0.3);
  prob.loads = LoadSpec::constant(Vec3::Zero(), Vec3::Zero());
  DisplacementField u;
  u.degree = 1;
  u.coeffs = VecX::Zero(3 * prob.mesh.n_nodes());
  DisplacementField p = u;
  SurfaceGeometry geom = surface_geometry(prob.mesh);
  SurfaceOperator ops = tangential_ops(prob.mesh, geom);
  BoundaryStress bstress = boundary_stress(prob.mesh, u, prob.mat, geom);
  VolumeDensity vol;
  AdjointSpec spec{&vol, AdjointRhsMode::DIRECT};
  ShapeGradientDensity G =
      hadamard_density(prob.mesh, u, p, prob.mat, prob.loads, spec, geom, ops, bstress);
  std::set<int> dverts;
  for (const auto& f : prob.mesh.facets)
    if (prob.mesh.is_dirichlet_facet(f))
      for (int k = 0; k < 3; ++k) dverts.insert(f.nodes[k]);
  for (const auto& [v, g] : G.values) {
    if (dverts.count(v))
      CHECK(g == 0.0);
    else
      CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Reynolds consistency: dJ[V] = int V_n dS matches the finite difference
  // of the flowed-mesh volume for an admissible V (zero near the clamp cap)
  Cutoff cut{-0.75, -0.3};
  VelocityField V = VelocityField::analytic(
      [cut](const Vec3& x) { return Vec3(cut.s(x[2]) * x); },
      [cut](const Vec3& x) {
        return Mat3(cut.s(x[2]) * Mat3::Identity() +
                    cut.ds(x[2]) * x * Vec3::UnitZ().transpose());
      },
      true);
  V.check_dirichlet_safe(prob.mesh);
  double dj = dj_from_gradient(prob.mesh, geom, G, V);
  FdResult fd = fd_shape_derivative(prob, vol, V, 1e-2);
  CHECK(dj == doctest::Approx(fd.richardson).epsilon(0.02));
}

TEST_CASE("gradient pairing: tangential fields and normal-trace dependence") {
  Setup s = cantilever_setup(1, 1);
  ComplianceDensity comp(s.prob.mat);
  AdjointSpec spec{&comp, AdjointRhsMode::DIRECT};
  DisplacementField p = solve_adjoint(s.prob.mesh, s.sys, s.u, s.prob.mat, spec);
  ShapeGradientDensity G = hadamard_density(s.prob.mesh, s.u, p, s.prob.mat, s.prob.loads,
                                            spec, s.geom, s.ops, s.bstress);

  // purely tangential V: zero pairing
  std::map<int, Vec3> tangent;
  DisplacementField W;
  W.degree = s.prob.mesh.degree;
  W.coeffs = VecX::Zero(3 * s.prob.mesh.n_nodes());
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (const auto& [v, n] : s.geom.vertex_normals) {
    Vec3 t(gauss(rng), gauss(rng), gauss(rng));
    t -= t.dot(n) * n;
    W.set_node(v, t);
  }
  VelocityField Vt = VelocityField::from_nodal(s.prob.mesh, W);
  CHECK(std::abs(dj_from_gradient(s.prob.mesh, s.geom, G, Vt)) < 1e-12);

  // two fields with the same normal trace pair identically
  VelocityField Va = random_admissible(11);
  DisplacementField Wb;
  Wb.degree = s.prob.mesh.degree;
  Wb.coeffs = VecX::Zero(3 * s.prob.mesh.n_nodes());
  for (const auto& [v, n] : s.geom.vertex_normals) {
    Vec3 t(gauss(rng), gauss(rng), gauss(rng));
    t -= t.dot(n) * n;
    Wb.set_node(v, Va.eval(s.prob.mesh.nodes[v]) + t);
  }
  VelocityField Vb = VelocityField::from_nodal(s.prob.mesh, Wb);
  CHECK(dj_from_gradient(s.prob.mesh, s.geom, G, Va) ==
        doctest::Approx(dj_from_gradient(s.prob.mesh, s.geom, G, Vb)).epsilon(1e-12));

  // linearity in V
  double d1 = dj_from_gradient(s.prob.mesh, s.geom, G, Va);
  DisplacementField W2;
  W2.degree = s.prob.mesh.degree;
  W2.coeffs = VecX::Zero(3 * s.prob.mesh.n_nodes());
  for (const auto& [v, n] : s.geom.vertex_normals)
    W2.set_node(v, -2.5 * Va.eval(s.prob.mesh.nodes[v]));
  VelocityField V2 = VelocityField::from_nodal(s.prob.mesh, W2);
  CHECK(dj_from_gradient(s.prob.mesh, s.geom, G, V2) == doctest::Approx(-2.5 * d1).epsilon(1e-12));
}

TEST_CASE("surface-sigma adjoint: weak and strong assemblies agree on the sphere") {
  // the two right-hand-side assemblies define the same functional up to
  // discretization error; compare through the adjoint states (H1), which
  // is the metric in which the consistency converges
  auto state_gap = [](int subdiv) {
    StateProblem prob;
    prob.mesh = make_icosphere_ball(1.0, subdiv);
    prob.mat = MaterialParams::from_E_nu(70000.0, 0.3);
    prob.mat.m = 2.0;
    prob.mat.sigma_0 = 50.0;
    LinearSystem sys = assemble_elasticity(prob.mesh, prob.mat);
    VecX r0 = VecX::Zero(sys.n_dof);
    apply_dirichlet(prob.mesh, sys, r0, nullptr);
    DisplacementField u;
    u.degree = 1;
    u.coeffs = VecX::Zero(3 * prob.mesh.n_nodes());
    for (int i = 0; i < prob.mesh.n_nodes(); ++i) {
      const Vec3& x = prob.mesh.nodes[i];
      u.set_node(i, Vec3(3e-2 * x[0] + 8e-3 * x[1] * x[1], -1.5e-2 * x[1],
                         8e-3 * x[2] + 1.5e-2 * x[0]));
    }
    SurfaceGeometry geom = surface_geometry(prob.mesh);
    SurfaceOperator ops = tangential_ops(prob.mesh, geom);
    BoundaryStress bstress = boundary_stress(prob.mesh, u, prob.mat, geom);
    LcfDensity lcf(prob.mat);
    AdjointSpec weak{&lcf, AdjointRhsMode::WEAK_STOKES};
    AdjointSpec strog{&lcf, AdjointRhsMode::STRONG_H};
    SolveOptions opts{.tol = 1e-12, .max_iter = 100000};
    DisplacementField pw =
        solve_adjoint(prob.mesh, sys, u, prob.mat, weak, &geom, &ops, &bstress, opts);
    DisplacementField ps =
        solve_adjoint(prob.mesh, sys, u, prob.mat, strog, &geom, &ops, &bstress, opts);
    DisplacementField diff;
    diff.degree = 1;
    diff.coeffs = pw.coeffs - ps.coeffs;
    double dl2, dh1, wl2, wh1;
    field_norms(prob.mesh, diff, &dl2, &dh1);
    field_norms(prob.mesh, pw, &wl2, &wh1);
    return std::sqrt(dl2 * dl2 + dh1 * dh1) / std::sqrt(wl2 * wl2 + wh1 * wh1);
  };
  double coarse = state_gap(3);
  double fine = state_gap(4);
  CHECK(fine <= 0.02);
  CHECK(fine < 0.5 * coarse);
}
