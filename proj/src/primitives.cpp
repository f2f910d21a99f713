#include "shapeopt/primitives.hpp"

#include <cmath>
#include <map>

namespace shapeopt {

namespace {

void push_cell(Mesh& m, int a, int b, int c, int d) {
  if (tet_volume(m.nodes[a], m.nodes[b], m.nodes[c], m.nodes[d]) < 0.0) std::swap(c, d);
  m.cells.push_back({a, b, c, d, -1, -1, -1, -1, -1, -1});
}

void push_facet(Mesh& m, int a, int b, int c, int tag) {
  Facet f;
  f.nodes = {a, b, c, -1, -1, -1};
  f.tag = tag;
  m.facets.push_back(f);
}

}  // namespace

Mesh make_reference_tet() {
  Mesh m;
  m.degree = 1;
  m.nodes = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.n_vertices = 4;
  push_cell(m, 0, 1, 2, 3);
  push_facet(m, 0, 2, 1, 1);
  push_facet(m, 0, 1, 3, 2);
  push_facet(m, 0, 3, 2, 3);
  push_facet(m, 1, 2, 3, 4);
  m.tag_map = {{1, BoundaryRole::DIRICHLET},
               {2, BoundaryRole::NEUMANN},
               {3, BoundaryRole::NEUMANN},
               {4, BoundaryRole::NEUMANN}};
  link_facets(m);
  return m;
}

Mesh make_box(double a, double b, double c, int nx, int ny, int nz) {
  Mesh m;
  m.degree = 1;
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.nodes.push_back(Vec3(a * i / nx, b * j / ny, c * k / nz));
  m.n_vertices = m.n_nodes();
  // 6-tet Kuhn split of each hex keeps faces between hexes compatible
  const int perm[6][4] = {{0, 1, 3, 7}, {0, 1, 7, 5}, {0, 5, 7, 4},
                          {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int v[8] = {id(i, j, k),         id(i + 1, j, k),         id(i, j + 1, k),
                    id(i + 1, j + 1, k), id(i, j, k + 1),         id(i + 1, j, k + 1),
                    id(i, j + 1, k + 1), id(i + 1, j + 1, k + 1)};
        for (const auto& p : perm) push_cell(m, v[p[0]], v[p[1]], v[p[2]], v[p[3]]);
      }
  // exterior faces of the split, tagged by bounding plane
  std::map<std::array<int, 3>, int> face_count;
  std::vector<std::array<int, 3>> faces;
  const int tf[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  for (const auto& cl : m.cells)
    for (const auto& lf : tf) {
      std::array<int, 3> key{cl[lf[0]], cl[lf[1]], cl[lf[2]]};
      auto s = key;
      std::sort(s.begin(), s.end());
      if (face_count.count(s))
        face_count[s]++;
      else {
        face_count[s] = 1;
        faces.push_back(key);
      }
    }
  auto plane_tag = [&](const std::array<int, 3>& f) {
    auto on = [&](auto pred) {
      return pred(m.nodes[f[0]]) && pred(m.nodes[f[1]]) && pred(m.nodes[f[2]]);
    };
    const double eps = 1e-12;
    if (on([&](const Vec3& x) { return std::abs(x[0]) < eps; })) return 1;
    if (on([&](const Vec3& x) { return std::abs(x[0] - a) < eps; })) return 2;
    if (on([&](const Vec3& x) { return std::abs(x[1]) < eps; })) return 3;
    if (on([&](const Vec3& x) { return std::abs(x[1] - b) < eps; })) return 4;
    if (on([&](const Vec3& x) { return std::abs(x[2]) < eps; })) return 5;
    if (on([&](const Vec3& x) { return std::abs(x[2] - c) < eps; })) return 6;
    return 0;
  };
  for (const auto& f : faces) {
    auto s = f;
    std::sort(s.begin(), s.end());
    if (face_count[s] != 1) continue;
    int tag = plane_tag(f);
    if (tag == 0) throw MeshError("box face off every bounding plane");
    push_facet(m, f[0], f[1], f[2], tag);
  }
  m.tag_map = {{1, BoundaryRole::DIRICHLET}, {2, BoundaryRole::NEUMANN},
               {3, BoundaryRole::NEUMANN},   {4, BoundaryRole::NEUMANN},
               {5, BoundaryRole::NEUMANN},   {6, BoundaryRole::NEUMANN}};
  link_facets(m);
  return m;
}

Mesh make_icosphere_ball(double radius, int subdivisions) {
  // icosahedron
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
      {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
      {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
      {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      int idx = static_cast<int>(verts.size());
      verts.push_back((0.5 * (verts[a] + verts[b])).normalized());
      mid[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& tr : tris) {
      int ab = midpoint(tr[0], tr[1]), bc = midpoint(tr[1], tr[2]), ca = midpoint(tr[2], tr[0]);
      next.push_back({tr[0], ab, ca});
      next.push_back({tr[1], bc, ab});
      next.push_back({tr[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  Mesh m;
  m.degree = 1;
  for (const auto& v : verts) m.nodes.push_back(radius * v);
  int center = m.n_nodes();
  m.nodes.push_back(Vec3::Zero());
  m.n_vertices = m.n_nodes();
  for (const auto& tr : tris) push_cell(m, center, tr[0], tr[1], tr[2]);
  for (const auto& tr : tris) {
    Vec3 c = (m.nodes[tr[0]] + m.nodes[tr[1]] + m.nodes[tr[2]]) / 3.0;
    int tag = (c[2] < -0.9 * radius) ? 1 : 2;
    push_facet(m, tr[0], tr[1], tr[2], tag);
  }
  m.tag_map = {{1, BoundaryRole::DIRICHLET}, {2, BoundaryRole::NEUMANN}};
  link_facets(m);
  return m;
}

Mesh make_bent_rod(const RodParams& p) {
  if (p.height <= 0 || p.length <= 0 || p.diameter <= 0)
    throw MeshError("rod parameters must be positive");
  // circle through the chord endpoints with the requested rise
  const double half = 0.5 * p.length;
  const double R = (p.height * p.height + half * half) / (2.0 * p.height);
  const double zc = p.height - R;  // circle center (0, 0, zc)
  const double theta1 = std::atan2(-zc, half);  // angle of the +x end
  const double theta0 = M_PI - theta1;          // -x end
  const double r0 = 0.5 * p.diameter;

  // cross-section template: polar disk, rings of 6r vertices around a center
  struct P2d {
    double a, r;  // angle fraction and radius fraction
  };
  std::vector<P2d> section;
  section.push_back({0.0, 0.0});
  std::vector<std::array<int, 3>> sect_tris;
  {
    std::vector<int> prev = {0};
    for (int ring = 1; ring <= p.n_rings; ++ring) {
      int count = 6 * ring;
      std::vector<int> cur;
      for (int i = 0; i < count; ++i) {
        section.push_back({2.0 * M_PI * i / count, static_cast<double>(ring) / p.n_rings});
        cur.push_back(static_cast<int>(section.size()) - 1);
      }
      // stitch ring to previous ring (fan for ring 1)
      if (ring == 1) {
        for (int i = 0; i < count; ++i) sect_tris.push_back({0, cur[i], cur[(i + 1) % count]});
      } else {
        // two-pointer angular merge; emits nc + np triangles
        int np = static_cast<int>(prev.size());
        int nc = count;
        int i = 0, j = 0;
        auto outer_angle = [&](int k) { return 2.0 * M_PI * k / nc; };
        auto inner_angle = [&](int k) { return 2.0 * M_PI * k / np; };
        while (i < nc || j < np) {
          bool advance_outer =
              (i < nc) && (j == np || outer_angle(i + 1) <= inner_angle(j + 1) + 1e-12);
          if (advance_outer) {
            sect_tris.push_back({cur[i % nc], cur[(i + 1) % nc], prev[j % np]});
            ++i;
          } else {
            sect_tris.push_back({prev[j % np], cur[i % nc], prev[(j + 1) % np]});
            ++j;
          }
        }
      }
      prev = cur;
    }
  }
  const int nsec = static_cast<int>(section.size());

  Mesh m;
  m.degree = 1;
  const int ns = p.n_segments;
  for (int s = 0; s <= ns; ++s) {
    double th = theta0 + (theta1 - theta0) * s / ns;
    Vec3 c(R * std::cos(th), 0.0, zc + R * std::sin(th));
    // local frame: tangent along the arc, normal pointing away from center
    Vec3 er(std::cos(th), 0.0, std::sin(th));
    Vec3 ey(0.0, 1.0, 0.0);
    for (const auto& q : section) {
      double rr = r0 * q.r;
      m.nodes.push_back(c + rr * std::cos(q.a) * ey + rr * std::sin(q.a) * er);
    }
  }
  m.n_vertices = m.n_nodes();
  auto gid = [&](int s, int i) { return s * nsec + i; };
  // prisms between sections, each split into 3 tets with the smallest-index
  // rule so quad diagonals match between neighboring prisms
  for (int s = 0; s < ns; ++s) {
    for (const auto& tr : sect_tris) {
      int a0 = gid(s, tr[0]), b0 = gid(s, tr[1]), c0 = gid(s, tr[2]);
      int a1 = gid(s + 1, tr[0]), b1 = gid(s + 1, tr[1]), c1 = gid(s + 1, tr[2]);
      // rotate so the prism's smallest index is first
      int A0 = a0, B0 = b0, C0 = c0, A1 = a1, B1 = b1, C1 = c1;
      if (b0 < A0 && b0 <= c0) {
        A0 = b0; B0 = c0; C0 = a0; A1 = b1; B1 = c1; C1 = a1;
      } else if (c0 < A0 && c0 < b0) {
        A0 = c0; B0 = a0; C0 = b0; A1 = c1; B1 = a1; C1 = b1;
      }
      // with the base vertex A0 smallest, both quads at A use diagonals from A0/A1
      if (std::min(B0, C1) < std::min(C0, B1)) {
        push_cell(m, A0, B0, C0, C1);
        push_cell(m, A0, B0, C1, B1);
        push_cell(m, A0, B1, C1, A1);
      } else {
        push_cell(m, A0, B0, C0, B1);
        push_cell(m, A0, B1, C0, C1);
        push_cell(m, A0, B1, C1, A1);
      }
    }
  }
  // end disks
  for (const auto& tr : sect_tris) {
    push_facet(m, gid(0, tr[0]), gid(0, tr[1]), gid(0, tr[2]), 2);    // loaded end (-x)
    push_facet(m, gid(ns, tr[0]), gid(ns, tr[1]), gid(ns, tr[2]), 1); // clamped end (+x)
  }
  // lateral surface: outer ring edges extruded
  {
    int first_outer = nsec - 6 * p.n_rings;
    int n_outer = 6 * p.n_rings;
    for (int s = 0; s < ns; ++s)
      for (int i = 0; i < n_outer; ++i) {
        int a = gid(s, first_outer + i);
        int b = gid(s, first_outer + (i + 1) % n_outer);
        int a1 = gid(s + 1, first_outer + i);
        int b1 = gid(s + 1, first_outer + (i + 1) % n_outer);
        // diagonal must match the prism split: smallest index corner rule
        if (std::min(a, b1) < std::min(b, a1)) {
          push_facet(m, a, b, b1, 3);
          push_facet(m, a, b1, a1, 3);
        } else {
          push_facet(m, a, b, a1, 3);
          push_facet(m, b, b1, a1, 3);
        }
      }
  }
  m.tag_map = {{1, BoundaryRole::DIRICHLET}, {2, BoundaryRole::NEUMANN}, {3, BoundaryRole::NEUMANN}};
  link_facets(m);
  return m;
}

}  // namespace shapeopt
