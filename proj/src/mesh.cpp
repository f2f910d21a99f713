#include "shapeopt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace shapeopt {

namespace {

// Local faces of a tet, outward-oriented for a positively oriented cell.
const int kTetFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

// Cell edges in the node-numbering order of the 10-node tet:
// mid-node 4+e lies on edge kTetEdges[e].
const int kTetEdges[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {2, 3}, {1, 3}};

std::array<int, 3> sorted3(int a, int b, int c) {
  std::array<int, 3> k{a, b, c};
  std::sort(k.begin(), k.end());
  return k;
}

}  // namespace

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

BoundaryRole Mesh::role_of(int tag) const {
  auto it = tag_map.find(tag);
  if (it == tag_map.end()) throw MeshError("no role mapped for boundary tag " + std::to_string(tag));
  return it->second;
}

double Mesh::cell_volume(int c) const {
  const auto& cl = cells[c];
  return tet_volume(nodes[cl[0]], nodes[cl[1]], nodes[cl[2]], nodes[cl[3]]);
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (int c = 0; c < n_cells(); ++c) v += cell_volume(c);
  return v;
}

double Mesh::facet_area(int f) const {
  const auto& n = facets[f].nodes;
  return 0.5 * (nodes[n[1]] - nodes[n[0]]).cross(nodes[n[2]] - nodes[n[0]]).norm();
}

std::vector<int> Mesh::boundary_nodes(BoundaryRole role) const {
  std::set<int> s;
  int npf = nodes_per_facet();
  for (const auto& f : facets)
    if (role_of(f.tag) == role)
      for (int k = 0; k < npf; ++k) s.insert(f.nodes[k]);
  return {s.begin(), s.end()};
}

std::vector<int> Mesh::boundary_nodes() const {
  std::set<int> s;
  int npf = nodes_per_facet();
  for (const auto& f : facets)
    for (int k = 0; k < npf; ++k) s.insert(f.nodes[k]);
  return {s.begin(), s.end()};
}

std::vector<int> Mesh::boundary_vertices() const {
  std::set<int> s;
  for (const auto& f : facets)
    for (int k = 0; k < 3; ++k) s.insert(f.nodes[k]);
  return {s.begin(), s.end()};
}

void Mesh::validate() const {
  for (int c = 0; c < n_cells(); ++c)
    if (cell_volume(c) <= 0.0)
      throw MeshError("cell " + std::to_string(c) + " has non-positive volume");
  for (const auto& f : facets) role_of(f.tag);  // every tag mapped
  // facet coverage is established by link_facets; re-check ownership here
  for (const auto& f : facets)
    if (f.cell < 0) throw MeshError("boundary facet without owning cell");
}

void link_facets(Mesh& mesh) {
  // exterior faces: those appearing in exactly one cell
  std::map<std::array<int, 3>, std::pair<int, int>> exterior;  // key -> (cell, local face)
  std::map<std::array<int, 3>, int> count;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int lf = 0; lf < 4; ++lf) {
      auto key = sorted3(mesh.cells[c][kTetFaces[lf][0]], mesh.cells[c][kTetFaces[lf][1]],
                         mesh.cells[c][kTetFaces[lf][2]]);
      count[key]++;
      exterior[key] = {c, lf};
    }
  }
  std::set<std::array<int, 3>> listed;
  for (auto& f : mesh.facets) {
    auto key = sorted3(f.nodes[0], f.nodes[1], f.nodes[2]);
    auto itc = count.find(key);
    if (itc == count.end() || itc->second != 1)
      throw MeshError("tagged facet is not an exterior cell face");
    auto [c, lf] = exterior[key];
    f.cell = c;
    f.local_face = lf;
    listed.insert(key);
    if (mesh.degree == 2) {
      // recover mid-edge nodes from the owner cell
      auto mid_of = [&](int a, int b) {
        for (int e = 0; e < 6; ++e) {
          int u = mesh.cells[c][kTetEdges[e][0]], v = mesh.cells[c][kTetEdges[e][1]];
          if ((u == a && v == b) || (u == b && v == a)) return mesh.cells[c][4 + e];
        }
        throw MeshError("facet edge not found in owning cell");
      };
      f.nodes[3] = mid_of(f.nodes[0], f.nodes[1]);
      f.nodes[4] = mid_of(f.nodes[1], f.nodes[2]);
      f.nodes[5] = mid_of(f.nodes[2], f.nodes[0]);
    }
  }
  for (const auto& [key, n] : count)
    if (n == 1 && !listed.count(key))
      throw MeshError("untagged boundary triangle (boundary not fully covered)");
}

Mesh to_p2(const Mesh& p1) {
  if (p1.degree != 1) throw MeshError("to_p2 expects a degree-1 mesh");
  Mesh m;
  m.degree = 2;
  m.nodes = p1.nodes;
  m.n_vertices = p1.n_vertices;
  m.tag_map = p1.tag_map;
  std::map<std::pair<int, int>, int> edge_node;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_node.find(key);
    if (it != edge_node.end()) return it->second;
    int id = m.n_nodes();
    m.nodes.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
    edge_node[key] = id;
    return id;
  };
  m.cells.resize(p1.n_cells());
  for (int c = 0; c < p1.n_cells(); ++c) {
    auto& cl = m.cells[c];
    for (int k = 0; k < 4; ++k) cl[k] = p1.cells[c][k];
    for (int e = 0; e < 6; ++e) cl[4 + e] = mid(cl[kTetEdges[e][0]], cl[kTetEdges[e][1]]);
  }
  m.facets = p1.facets;
  link_facets(m);
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  if (mesh.degree != 1) throw MeshError("refine_uniform expects a degree-1 mesh");
  Mesh m;
  m.degree = 1;
  m.nodes = mesh.nodes;
  m.n_vertices = 0;  // set below
  m.tag_map = mesh.tag_map;
  std::map<std::pair<int, int>, int> edge_node;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_node.find(key);
    if (it != edge_node.end()) return it->second;
    int id = static_cast<int>(m.nodes.size());
    m.nodes.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
    edge_node[key] = id;
    return id;
  };
  auto push_cell = [&](int a, int b, int c, int d) {
    if (tet_volume(m.nodes[a], m.nodes[b], m.nodes[c], m.nodes[d]) < 0.0) std::swap(c, d);
    m.cells.push_back({a, b, c, d, -1, -1, -1, -1, -1, -1});
  };
  for (int c = 0; c < mesh.n_cells(); ++c) {
    int v0 = mesh.cells[c][0], v1 = mesh.cells[c][1], v2 = mesh.cells[c][2], v3 = mesh.cells[c][3];
    int m01 = mid(v0, v1), m02 = mid(v0, v2), m03 = mid(v0, v3);
    int m12 = mid(v1, v2), m13 = mid(v1, v3), m23 = mid(v2, v3);
    // corner tets
    push_cell(v0, m01, m02, m03);
    push_cell(v1, m01, m12, m13);
    push_cell(v2, m02, m12, m23);
    push_cell(v3, m03, m13, m23);
    // inner octahedron: split along the shortest diagonal
    double d1 = (m.nodes[m01] - m.nodes[m23]).norm();
    double d2 = (m.nodes[m02] - m.nodes[m13]).norm();
    double d3 = (m.nodes[m03] - m.nodes[m12]).norm();
    if (d1 <= d2 && d1 <= d3) {
      push_cell(m01, m23, m02, m03);
      push_cell(m01, m23, m03, m13);
      push_cell(m01, m23, m13, m12);
      push_cell(m01, m23, m12, m02);
    } else if (d2 <= d3) {
      push_cell(m02, m13, m01, m03);
      push_cell(m02, m13, m03, m23);
      push_cell(m02, m13, m23, m12);
      push_cell(m02, m13, m12, m01);
    } else {
      push_cell(m03, m12, m01, m02);
      push_cell(m03, m12, m02, m23);
      push_cell(m03, m12, m23, m13);
      push_cell(m03, m12, m13, m01);
    }
  }
  for (const auto& f : mesh.facets) {
    int a = f.nodes[0], b = f.nodes[1], c = f.nodes[2];
    int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    for (auto& t : std::vector<std::array<int, 3>>{{a, ab, ca}, {b, bc, ab}, {c, ca, bc}, {ab, bc, ca}}) {
      Facet nf;
      nf.nodes = {t[0], t[1], t[2], -1, -1, -1};
      nf.tag = f.tag;
      m.facets.push_back(nf);
    }
  }
  m.n_vertices = static_cast<int>(m.nodes.size());
  link_facets(m);
  return m;
}

Mesh deform(const Mesh& mesh, const std::vector<Vec3>& displacement, double scale,
            bool remidpoint) {
  if (static_cast<int>(displacement.size()) < mesh.n_vertices)
    throw MeshError("displacement must cover all vertices");
  Mesh m = mesh;
  for (int i = 0; i < mesh.n_vertices; ++i) m.nodes[i] += scale * displacement[i];
  if (mesh.degree == 2) {
    if (!remidpoint && static_cast<int>(displacement.size()) != mesh.n_nodes())
      throw MeshError("degree-2 deform without re-midpointing needs all node displacements");
    if (remidpoint) {
      std::vector<bool> done(m.n_nodes(), false);
      for (const auto& cl : m.cells)
        for (int e = 0; e < 6; ++e) {
          int id = cl[4 + e];
          if (!done[id]) {
            m.nodes[id] = 0.5 * (m.nodes[cl[kTetEdges[e][0]]] + m.nodes[cl[kTetEdges[e][1]]]);
            done[id] = true;
          }
        }
    } else {
      for (int i = mesh.n_vertices; i < mesh.n_nodes(); ++i) m.nodes[i] += scale * displacement[i];
    }
  }
  int worst = -1;
  double worst_v = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    double v = m.cell_volume(c);
    if (v <= 0.0 && (worst < 0 || v < worst_v)) {
      worst = c;
      worst_v = v;
    }
  }
  if (worst >= 0)
    throw MeshError("deformation inverts cell " + std::to_string(worst));
  return m;
}

MeshQuality quality(const Mesh& mesh) {
  MeshQuality q;
  q.min_volume_ratio = std::numeric_limits<double>::max();
  q.min_dihedral = std::numeric_limits<double>::max();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cl = mesh.cells[c];
    const Vec3 x[4] = {mesh.nodes[cl[0]], mesh.nodes[cl[1]], mesh.nodes[cl[2]], mesh.nodes[cl[3]]};
    double v = tet_volume(x[0], x[1], x[2], x[3]);
    double hmax = 0.0;
    for (int e = 0; e < 6; ++e)
      hmax = std::max(hmax, (x[kTetEdges[e][0]] - x[kTetEdges[e][1]]).norm());
    double vreg = hmax * hmax * hmax / (6.0 * std::sqrt(2.0));  // regular tet of edge hmax
    q.min_volume_ratio = std::min(q.min_volume_ratio, v / vreg);
    // dihedral angles from inward face normals
    Vec3 n[4];
    for (int lf = 0; lf < 4; ++lf) {
      const Vec3& a = x[kTetFaces[lf][0]];
      const Vec3& b = x[kTetFaces[lf][1]];
      const Vec3& cc = x[kTetFaces[lf][2]];
      n[lf] = (b - a).cross(cc - a).normalized();
    }
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        double cosd = -n[i].dot(n[j]);  // outward normals -> dihedral = pi - angle(n_i, n_j)
        cosd = std::clamp(cosd, -1.0, 1.0);
        q.min_dihedral = std::min(q.min_dihedral, std::acos(cosd));
      }
  }
  return q;
}

}  // namespace shapeopt
