#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "shapeopt/gmsh_io.hpp"
#include "shapeopt/primitives.hpp"
#include "shapeopt/surface.hpp"

using namespace shapeopt;

TEST_CASE("reference tet and unit cube volumes") {
  Mesh tet = make_reference_tet();
  CHECK(tet.n_cells() == 1);
  CHECK(tet.facets.size() == 4);
  CHECK(tet.total_volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  Mesh cube = make_unit_cube(3);
  CHECK(cube.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
  cube.validate();
}

TEST_CASE("gmsh round trip preserves mesh") {
  Mesh rod = make_bent_rod({.n_segments = 8, .n_rings = 1});
  std::string path = "rod_test.msh";
  write_gmsh(path, rod);
  Mesh back = read_gmsh(path, rod.tag_map);
  CHECK(back.n_nodes() == rod.n_nodes());
  CHECK(back.n_cells() == rod.n_cells());
  CHECK(back.total_volume() == doctest::Approx(rod.total_volume()).epsilon(1e-12));
  CHECK(back.facets.size() == rod.facets.size());
}

TEST_CASE("gmsh reader reports malformed input with line numbers") {
  std::istringstream bad("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\nnot_a_number\n");
  CHECK_THROWS_AS(read_gmsh(bad), MeshError);

  // untagged boundary triangle: one exterior face missing from $Elements
  std::ostringstream ms;
  ms << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n"
        "1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
        "$Elements\n4\n"
        "1 4 2 1 1 1 2 3 4\n"
        "2 2 2 1 1 1 3 2\n"
        "3 2 2 2 2 1 2 4\n"
        "4 2 2 2 2 1 4 3\n"  // face (2,3,4) left untagged
        "$EndElements\n";
  std::istringstream in(ms.str());
  CHECK_THROWS_WITH_AS(read_gmsh(in), doctest::Contains("untagged"), MeshError);
}

TEST_CASE("icosphere boundary is watertight (Euler characteristic)") {
  Mesh ball = make_icosphere_ball(1.0, 3);
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (const auto& f : ball.facets) {
    for (int k = 0; k < 3; ++k) {
      verts.insert(f.nodes[k]);
      int a = f.nodes[k], b = f.nodes[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  long V = verts.size(), E = edges.size(), F = ball.facets.size();
  CHECK(V - E + F == 2);
  // refinement-3 volume within 1% of the ball
  CHECK(std::abs(ball.total_volume() - 4.0 * M_PI / 3.0) / (4.0 * M_PI / 3.0) < 0.01);
}

TEST_CASE("deform: identity, translation, uniform scaling") {
  Mesh cube = make_unit_cube(2);
  std::vector<Vec3> zero(cube.n_vertices, Vec3::Zero());
  Mesh same = deform(cube, zero, 1.0);
  for (int i = 0; i < cube.n_nodes(); ++i) CHECK((same.nodes[i] - cube.nodes[i]).norm() == 0.0);

  std::vector<Vec3> shift(cube.n_vertices, Vec3(0.3, -0.2, 0.1));
  Mesh moved = deform(cube, shift, 1.0);
  CHECK(moved.total_volume() == doctest::Approx(cube.total_volume()).epsilon(1e-12));

  std::vector<Vec3> radial(cube.n_vertices);
  for (int i = 0; i < cube.n_vertices; ++i) radial[i] = cube.nodes[i];
  double t = 0.13;
  Mesh scaled = deform(cube, radial, t);
  CHECK(scaled.total_volume() ==
        doctest::Approx(std::pow(1.0 + t, 3) * cube.total_volume()).epsilon(1e-12));
}

TEST_CASE("deform reports the inverted cell") {
  Mesh tet = make_reference_tet();
  std::vector<Vec3> d(4, Vec3::Zero());
  d[3] = Vec3(0, 0, -2.0);  // push apex through the base
  CHECK_THROWS_AS(deform(tet, d, 1.0), MeshError);
}

TEST_CASE("quality: regular tet dihedral and squashed tet") {
  Mesh m;
  m.degree = 1;
  // regular tetrahedron
  m.nodes = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  m.n_vertices = 4;
  m.cells.push_back({0, 1, 2, 3, -1, -1, -1, -1, -1, -1});
  if (m.cell_volume(0) < 0) std::swap(m.cells[0][2], m.cells[0][3]);
  MeshQuality q = quality(m);
  CHECK(q.min_dihedral == doctest::Approx(std::acos(1.0 / 3.0)).epsilon(1e-6));
  CHECK(q.min_volume_ratio == doctest::Approx(1.0).epsilon(1e-9));

  Mesh flat;
  flat.degree = 1;
  flat.nodes = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.3, 0.3, 1e-6)};
  flat.n_vertices = 4;
  flat.cells.push_back({0, 1, 2, 3, -1, -1, -1, -1, -1, -1});
  CHECK(quality(flat).min_volume_ratio < 1e-5);
}

TEST_CASE("surface geometry: plane patch has zero curvature") {
  Mesh cube = make_unit_cube(4);
  SurfaceGeometry g = surface_geometry(cube);
  for (const auto& [v, n] : g.vertex_normals) CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // interior vertices of the z=0 face: flat, and normals point outward (-z)
  for (const auto& [v, n] : g.vertex_normals) {
    const Vec3& x = cube.nodes[v];
    bool interior_bottom = std::abs(x[2]) < 1e-12 && x[0] > 0.1 && x[0] < 0.9 && x[1] > 0.1 &&
                           x[1] < 0.9;
    if (interior_bottom) {
      CHECK(std::abs(g.mean_curvature.at(v)) < 1e-10);
      CHECK(n.dot(Vec3(0, 0, -1)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("surface geometry: sphere curvature 2/R and scaling") {
  for (double R : {1.0, 0.5}) {
    Mesh ball = make_icosphere_ball(R, 3);
    SurfaceGeometry g = surface_geometry(ball);
    double expect = 2.0 / R;
    for (const auto& [v, kappa] : g.mean_curvature) {
      CHECK(kappa == doctest::Approx(expect).epsilon(0.02));
    }
    // curvature integral: int kappa dS = (2/R) * 4 pi R^2 within 3%
    double total = 0.0, area = 0.0;
    for (const auto& [v, kappa] : g.mean_curvature) {
      total += kappa * g.vertex_area.at(v);
      area += g.vertex_area.at(v);
    }
    CHECK(total == doctest::Approx(8.0 * M_PI * R).epsilon(0.03));
    CHECK(area == doctest::Approx(4.0 * M_PI * R * R).epsilon(0.02));
  }
}

TEST_CASE("surface divergence theorem for constant fields") {
  Mesh ball = make_icosphere_ball(1.0, 2);
  SurfaceGeometry g = surface_geometry(ball);
  Vec3 w(0.7, -0.3, 0.2);
  double flux = 0.0;
  for (size_t fi = 0; fi < ball.facets.size(); ++fi)
    flux += ball.facet_area(static_cast<int>(fi)) * w.dot(g.facet_normals[fi]);
  CHECK(std::abs(flux) < 1e-10);
}

TEST_CASE("refinement: volume additivity and facet inheritance") {
  Mesh rod = make_bent_rod({.n_segments = 6, .n_rings = 1});
  Mesh fine = refine_uniform(rod);
  CHECK(fine.n_cells() == 8 * rod.n_cells());
  CHECK(fine.total_volume() == doctest::Approx(rod.total_volume()).epsilon(1e-12));
  CHECK(fine.facets.size() == 4 * rod.facets.size());
  fine.validate();

  Mesh p2 = to_p2(fine);
  CHECK(p2.degree == 2);
  CHECK(p2.n_vertices == fine.n_nodes());
  p2.validate();
}

TEST_CASE("bent rod generator respects the requested envelope") {
  RodParams p;
  Mesh rod = make_bent_rod(p);
  double xmin = 1e9, xmax = -1e9, zmax = -1e9;
  for (int i = 0; i < rod.n_vertices; ++i) {
    xmin = std::min(xmin, rod.nodes[i][0]);
    xmax = std::max(xmax, rod.nodes[i][0]);
    zmax = std::max(zmax, rod.nodes[i][2]);
  }
  CHECK(xmax - xmin == doctest::Approx(p.length).epsilon(0.2));  // plus cross-section overhang
  CHECK(zmax == doctest::Approx(p.height + 0.5 * p.diameter).epsilon(0.05));
  // tags: one Dirichlet end, one loaded end, lateral surface
  std::set<int> tags;
  for (const auto& f : rod.facets) tags.insert(f.tag);
  CHECK(tags == std::set<int>{1, 2, 3});
  rod.validate();
}
