#include <doctest.h>

#include <cmath>
#include <random>

#include "shapeopt/fem.hpp"
#include "shapeopt/primitives.hpp"

using namespace shapeopt;

namespace {

const double kPi = M_PI;

MaterialParams paper_material() { return MaterialParams::from_E_nu(70000.0, 0.3); }

// manufactured displacement u = a * sin(pi x) sin(pi y) sin(pi z)
struct Manufactured {
  Vec3 a;
  MaterialParams mat;

  Vec3 u(const Vec3& x) const {
    return a * std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
  }
  Mat3 hess_s(const Vec3& x) const {
    double s0 = std::sin(kPi * x[0]), s1 = std::sin(kPi * x[1]), s2 = std::sin(kPi * x[2]);
    double c0 = std::cos(kPi * x[0]), c1 = std::cos(kPi * x[1]), c2 = std::cos(kPi * x[2]);
    Mat3 h;
    double p2 = kPi * kPi;
    h(0, 0) = h(1, 1) = h(2, 2) = -p2 * s0 * s1 * s2;
    h(0, 1) = h(1, 0) = p2 * c0 * c1 * s2;
    h(0, 2) = h(2, 0) = p2 * c0 * s1 * c2;
    h(1, 2) = h(2, 1) = p2 * s0 * c1 * c2;
    return h;
  }
  // f = -div sigma(u) = -[(lambda + mu) H_s a + mu a Lap(s)]
  Vec3 f(const Vec3& x) const {
    double lap = -3.0 * kPi * kPi * std::sin(kPi * x[0]) * std::sin(kPi * x[1]) *
                 std::sin(kPi * x[2]);
    return -((mat.lambda + mat.mu) * (hess_s(x) * a) + mat.mu * lap * a);
  }
};

Mesh all_dirichlet(Mesh m) {
  for (auto& [tag, role] : m.tag_map) role = BoundaryRole::DIRICHLET;
  return m;
}

double l2_error(const Mesh& mesh, const DisplacementField& uh, const Manufactured& mms) {
  auto rule = tet_rule_conical(3);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame fr = cell_frame(mesh, c);
    for (const auto& q : rule) {
      Vec3 x = fr.x0 + fr.jac * q.xi;
      acc += q.w * fr.detJ * (eval_field(mesh, uh, c, q.xi) - mms.u(x)).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("conical quadrature integrates monomials exactly") {
  auto rule = tet_rule_conical(4);  // degree 7
  double v = 0.0, m1 = 0.0, m5 = 0.0;
  for (const auto& q : rule) {
    v += q.w;
    m1 += q.w * q.xi[0];
    m5 += q.w * q.xi[0] * q.xi[0] * q.xi[1] * q.xi[1] * q.xi[2];
  }
  CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(m1 == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  // int x^a y^b z^c over the tet = a! b! c! / (a+b+c+3)!
  CHECK(m5 == doctest::Approx(4.0 / 40320.0).epsilon(1e-10));

  auto tri = tri_rule_conical(3);  // degree 5
  double a = 0.0, mx = 0.0;
  for (const auto& q : tri) {
    a += q.w;
    mx += q.w * q.xi[0] * q.xi[0] * q.xi[1];
  }
  CHECK(a == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(mx == doctest::Approx(2.0 / 120.0).epsilon(1e-12));
}

TEST_CASE("rigid modes lie in the unconstrained kernel") {
  MaterialParams mat = paper_material();
  for (int degree : {1, 2}) {
    Mesh mesh = make_unit_cube(2);
    if (degree == 2) mesh = to_p2(mesh);
    LinearSystem sys = assemble_elasticity(mesh, mat);
    double anorm = 0.0;
    for (int k = 0; k < sys.A_free.outerSize(); ++k)
      for (SparseMat::InnerIterator it(sys.A_free, k); it; ++it)
        anorm = std::max(anorm, std::abs(it.value()));
    std::vector<std::function<Vec3(const Vec3&)>> modes = {
        [](const Vec3&) { return Vec3(1, 0, 0); },
        [](const Vec3&) { return Vec3(0, 0, 1); },
        [](const Vec3& x) { return Vec3(-x[1], x[0], 0); },
        [](const Vec3& x) { return Vec3(0, -x[2], x[1]); }};
    for (const auto& mode : modes) {
      VecX r(sys.n_dof);
      for (int i = 0; i < mesh.n_nodes(); ++i) r.segment<3>(3 * i) = mode(mesh.nodes[i]);
      VecX Ar = sys.A_free * r;
      CHECK(Ar.norm() <= 1e-9 * anorm * r.norm());
    }
  }
}

TEST_CASE("single-tet element matrix matches the constant-strain closed form") {
  MaterialParams mat;
  mat.lambda = 1.0;
  mat.mu = 1.0;
  Mesh tet = make_reference_tet();
  LinearSystem sys = assemble_elasticity(tet, mat);
  // closed form: K[(a,i),(b,j)] = V (lambda g_a[i] g_b[j] + mu g_b[i] g_a[j]
  //                                + mu delta_ij <g_a, g_b>), V = 1/6
  Vec3 g[4] = {Vec3(-1, -1, -1), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  double V = 1.0 / 6.0;
  Eigen::MatrixXd K = Eigen::MatrixXd(sys.A_free);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double expect = V * (mat.lambda * g[a][i] * g[b][j] + mat.mu * g[b][i] * g[a][j] +
                               (i == j ? mat.mu * g[a].dot(g[b]) : 0.0));
          CHECK(K(3 * a + i, 3 * b + j) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("energy of a linear field matches the constant-strain identity") {
  MaterialParams mat = paper_material();
  Mesh mesh = to_p2(make_unit_cube(3));
  LinearSystem sys = assemble_elasticity(mesh, mat);
  Mat3 M;
  M << 0.2, 0.1, -0.05, 0.0, -0.15, 0.3, 0.07, 0.02, 0.11;
  VecX u(sys.n_dof);
  for (int i = 0; i < mesh.n_nodes(); ++i) u.segment<3>(3 * i) = M * mesh.nodes[i];
  Mat3 eps = sym(M);
  double expect = mesh.total_volume() *
                  (mat.lambda * eps.trace() * eps.trace() + 2.0 * mat.mu * ddot(eps, eps));
  CHECK(u.dot(sys.A_free * u) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("load assembly: partition of unity for volume and surface loads") {
  Mesh mesh = to_p2(make_unit_cube(2));
  Vec3 fc(1.5, -2.0, 0.25);
  VecX rhs = assemble_load(mesh, [&](const Vec3&) { return fc; }, nullptr);
  Vec3 total = Vec3::Zero();
  for (int i = 0; i < mesh.n_nodes(); ++i) total += rhs.segment<3>(3 * i);
  for (int k = 0; k < 3; ++k) CHECK(total[k] == doctest::Approx(fc[k]).epsilon(1e-12));

  Vec3 gc(0.0, 3.0, 1.0);
  VecX rhs2 = assemble_load(mesh, nullptr, [&](const Vec3&, int tag) {
    return tag == 2 ? gc : Vec3::Zero();  // x = 1 face, unit area
  });
  total.setZero();
  for (int i = 0; i < mesh.n_nodes(); ++i) total += rhs2.segment<3>(3 * i);
  for (int k = 0; k < 3; ++k) CHECK(total[k] == doctest::Approx(gc[k]).epsilon(1e-12));

  VecX zero = assemble_load(mesh, nullptr, nullptr);
  CHECK(zero.norm() == 0.0);
}

TEST_CASE("traction on Dirichlet facets is ignored with a warning") {
  Mesh mesh = make_unit_cube(2);
  bool warned = false;
  VecX rhs = assemble_load(
      mesh, nullptr,
      [](const Vec3&, int tag) { return tag == 1 ? Vec3(1, 0, 0) : Vec3::Zero(); }, &warned);
  CHECK(warned);
  CHECK(rhs.norm() == 0.0);
}

TEST_CASE("patch test: global linear field reproduced to 1e-9") {
  MaterialParams mat = paper_material();
  Mat3 M;
  M << 1e-3, 2e-4, -1e-4, 0.0, -5e-4, 3e-4, 2e-4, 1e-4, 4e-4;
  for (int degree : {1, 2}) {
    Mesh mesh = all_dirichlet(make_unit_cube(3));
    if (degree == 2) mesh = to_p2(mesh);
    LinearSystem sys = assemble_elasticity(mesh, mat);
    VecX rhs = VecX::Zero(sys.n_dof);
    apply_dirichlet(mesh, sys, rhs, [&](const Vec3& x) { return Vec3(M * x); });
    DisplacementField u = solve(mesh, sys, rhs, {.tol = 1e-13});
    double err = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      err = std::max(err, (u.at_node(i) - M * mesh.nodes[i]).norm());
    CHECK(err < 1e-9);
  }
}

TEST_CASE("zero rhs gives the zero solution") {
  Mesh mesh = make_unit_cube(2);
  LinearSystem sys = assemble_elasticity(mesh, paper_material());
  VecX rhs = VecX::Zero(sys.n_dof);
  apply_dirichlet(mesh, sys, rhs, nullptr);
  DisplacementField u = solve(mesh, sys, rhs);
  CHECK(u.coeffs.norm() == 0.0);
}

TEST_CASE("manufactured solution converges at order degree + 1") {
  Manufactured mms;
  mms.a = Vec3(0.4, -0.3, 0.25);
  mms.mat = MaterialParams::from_E_nu(10.0, 0.3);
  for (int degree : {1, 2}) {
    std::vector<double> hs, errs;
    std::vector<int> ns =
        degree == 1 ? std::vector<int>{2, 4, 8, 16} : std::vector<int>{1, 2, 4, 8};
    for (int n : ns) {
      Mesh mesh = all_dirichlet(make_unit_cube(n));
      if (degree == 2) mesh = to_p2(mesh);
      LinearSystem sys = assemble_elasticity(mesh, mms.mat);
      VecX rhs = assemble_load(mesh, [&](const Vec3& x) { return mms.f(x); }, nullptr);
      apply_dirichlet(mesh, sys, rhs, [&](const Vec3& x) { return mms.u(x); });
      DisplacementField uh = solve(mesh, sys, rhs, {.tol = 1e-12});
      hs.push_back(1.0 / n);
      errs.push_back(l2_error(mesh, uh, mms));
    }
    // observed order after three refinements
    size_t last = errs.size() - 1;
    double rate = std::log2(errs[last - 1] / errs[last]);
    CHECK(std::abs(rate - (degree + 1)) < 0.2);
    // and monotone decay throughout
    for (size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
  }
}

TEST_CASE("Korn positivity of the constrained system") {
  MaterialParams mat = paper_material();
  for (int degree : {1, 2}) {
    Mesh mesh = make_unit_cube(2);
    if (degree == 2) mesh = to_p2(mesh);
    LinearSystem sys = assemble_elasticity(mesh, mat);
    VecX rhs = VecX::Zero(sys.n_dof);
    apply_dirichlet(mesh, sys, rhs, nullptr);
    CHECK(korn_smallest_ritz(mesh, sys, 20) > 0.0);
  }
}

TEST_CASE("Galerkin orthogonality within solver tolerance") {
  MaterialParams mat = paper_material();
  Mesh mesh = make_unit_cube(3);
  LinearSystem sys = assemble_elasticity(mesh, mat);
  VecX rhs = assemble_load(
      mesh, [](const Vec3&) { return Vec3(0, 0, -1e-2); },
      [](const Vec3&, int tag) { return tag == 2 ? Vec3(5, 0, 0) : Vec3::Zero(); });
  apply_dirichlet(mesh, sys, rhs, nullptr);
  double tol = 1e-11;
  DisplacementField u = solve(mesh, sys, rhs, {.tol = tol});
  VecX r = sys.A * u.coeffs - rhs;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 10; ++k) {
    VecX v(sys.n_dof);
    for (int i = 0; i < sys.n_dof; ++i) v[i] = gauss(rng);
    CHECK(std::abs(v.dot(r)) <= 10.0 * tol * rhs.norm() * v.norm());
  }
}

TEST_CASE("reaction forces balance the applied loads") {
  MaterialParams mat = paper_material();
  Mesh mesh = to_p2(make_box(2, 1, 1, 4, 2, 2));
  LinearSystem sys = assemble_elasticity(mesh, mat);
  Vec3 fc(0, 0, -0.5), gc(3, 1, 0);
  VecX rhs_free = assemble_load(
      mesh, [&](const Vec3&) { return fc; },
      [&](const Vec3&, int tag) { return tag == 2 ? gc : Vec3::Zero(); });
  VecX rhs = rhs_free;
  apply_dirichlet(mesh, sys, rhs, nullptr);
  DisplacementField u = solve(mesh, sys, rhs, {.tol = 1e-12});
  VecX residual = sys.A_free * u.coeffs - rhs_free;
  Vec3 reaction = Vec3::Zero();
  for (int nd : sys.dirichlet_nodes) reaction += residual.segment<3>(3 * nd);
  Vec3 total_load = fc * mesh.total_volume() + gc * 1.0;  // loaded face has unit area
  CHECK((reaction + total_load).norm() <= 1e-8 * total_load.norm());
}

TEST_CASE("stress of simple fields") {
  MaterialParams mat = paper_material();
  Mesh mesh = make_unit_cube(2);
  DisplacementField u;
  u.degree = 1;
  u.coeffs = VecX::Zero(3 * mesh.n_nodes());

  for (int i = 0; i < mesh.n_nodes(); ++i) u.set_node(i, Vec3(0.1, -0.2, 0.3));
  StressField s = stress(mesh, u, mat);
  for (const auto& sc : s.cell_stress) CHECK(sc.norm() < 1e-12);

  double alpha = 1e-3;
  for (int i = 0; i < mesh.n_nodes(); ++i) u.set_node(i, alpha * mesh.nodes[i]);
  s = stress(mesh, u, mat);
  double p = (3.0 * mat.lambda + 2.0 * mat.mu) * alpha;
  for (const auto& sc : s.cell_stress) CHECK((sc - p * Mat3::Identity()).norm() < 1e-9 * p);

  double gamma = 2e-3;
  for (int i = 0; i < mesh.n_nodes(); ++i) u.set_node(i, Vec3(gamma * mesh.nodes[i][1], 0, 0));
  s = stress(mesh, u, mat);
  Mat3 expect = Mat3::Zero();
  expect(0, 1) = expect(1, 0) = mat.mu * gamma;
  for (const auto& sc : s.cell_stress) CHECK((sc - expect).norm() < 1e-9 * mat.mu * gamma);
}

TEST_CASE("boundary stress recovery for quadratic fields") {
  MaterialParams mat = paper_material();
  Mesh mesh = to_p2(make_unit_cube(2));
  DisplacementField u;
  u.degree = 2;
  u.coeffs = VecX::Zero(3 * mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i)
    u.set_node(i, Vec3(mesh.nodes[i][0] * mesh.nodes[i][0], 0, 0));
  SurfaceGeometry geom = surface_geometry(mesh);
  BoundaryStress bs = boundary_stress(mesh, u, mat, geom);
  CHECK(!bs.p1_warning);
  for (const auto& [v, ds] : bs.dsigma_dn) {
    const Vec3& n = geom.normal_at(v);
    double expect = 2.0 * (mat.lambda + 2.0 * mat.mu) * n[0];
    CHECK(ds(0, 0) == doctest::Approx(expect).epsilon(1e-8).scale(mat.lambda));
    CHECK(bs.sigma.at(v)(0, 0) ==
          doctest::Approx(2.0 * (mat.lambda + 2.0 * mat.mu) * mesh.nodes[v][0])
              .epsilon(1e-9)
              .scale(mat.lambda));
  }

  for (int i = 0; i < mesh.n_nodes(); ++i) u.set_node(i, Vec3(0.5 * mesh.nodes[i][1], 0, 0));
  bs = boundary_stress(mesh, u, mat, geom);
  for (const auto& [v, ds] : bs.dsigma_dn) CHECK(ds.norm() < 1e-9 * mat.mu);
}
