#include "shapeopt/tangential.hpp"

#include <cmath>

namespace shapeopt {

namespace {

// P1 barycentric gradients of a 3D triangle; in-plane vectors.
void p1_gradients(const Vec3& a, const Vec3& b, const Vec3& c, Vec3 g[3]) {
  Vec3 nw = (b - a).cross(c - a);  // winding normal, |nw| = 2A
  double n2 = nw.squaredNorm();
  g[0] = nw.cross(c - b) / n2;
  g[1] = nw.cross(a - c) / n2;
  g[2] = nw.cross(b - a) / n2;
}

}  // namespace

SurfaceOperator tangential_ops(const Mesh& mesh, const SurfaceGeometry& geom) {
  SurfaceOperator op;
  for (const auto& [v, n] : geom.vertex_normals) {
    op.index_of[v] = static_cast<int>(op.vertices.size());
    op.vertices.push_back(v);
    op.node_pos[v] = mesh.nodes[v];
  }
  op.lumped_mass = VecX::Zero(op.n());
  std::vector<Triplet> trips;
  for (size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const Facet& f = mesh.facets[fi];
    std::array<int, 3> t{f.nodes[0], f.nodes[1], f.nodes[2]};
    op.tris.push_back(t);
    const Vec3& a = mesh.nodes[t[0]];
    const Vec3& b = mesh.nodes[t[1]];
    const Vec3& c = mesh.nodes[t[2]];
    double area = 0.5 * (b - a).cross(c - a).norm();
    if (area < 1e-14) throw MeshError("degenerate surface triangle");
    op.tri_area.push_back(area);
    op.tri_normal.push_back(geom.facet_normals[fi]);
    const Vec3* x[3] = {&a, &b, &c};
    for (int k = 0; k < 3; ++k) {
      int i = (k + 1) % 3, j = (k + 2) % 3;
      Vec3 u = *x[i] - *x[k], v = *x[j] - *x[k];
      double cot = u.dot(v) / u.cross(v).norm();
      int si = op.index_of[t[i]], sj = op.index_of[t[j]];
      trips.emplace_back(si, sj, -0.5 * cot);
      trips.emplace_back(sj, si, -0.5 * cot);
      trips.emplace_back(si, si, 0.5 * cot);
      trips.emplace_back(sj, sj, 0.5 * cot);
      op.lumped_mass[op.index_of[t[k]]] += area / 3.0;
    }
  }
  op.stiffness.resize(op.n(), op.n());
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  return op;
}

Vec3 SurfaceOperator::tri_gradient(const std::map<int, double>& f, int tri) const {
  const auto& t = tris[tri];
  Vec3 g[3];
  p1_gradients(node_pos.at(t[0]), node_pos.at(t[1]), node_pos.at(t[2]), g);
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 3; ++k) out += f.at(t[k]) * g[k];
  return out;
}

Mat3 SurfaceOperator::tri_jacobian(const std::map<int, Vec3>& w, int tri) const {
  const auto& t = tris[tri];
  Vec3 g[3];
  p1_gradients(node_pos.at(t[0]), node_pos.at(t[1]), node_pos.at(t[2]), g);
  Mat3 out = Mat3::Zero();
  for (int k = 0; k < 3; ++k) out += w.at(t[k]) * g[k].transpose();
  return out;
}

std::map<int, Vec3> SurfaceOperator::vertex_gradient(const std::map<int, double>& f) const {
  std::map<int, Vec3> acc;
  std::map<int, double> wsum;
  for (size_t ti = 0; ti < tris.size(); ++ti) {
    Vec3 g = tri_gradient(f, static_cast<int>(ti));
    for (int v : tris[ti]) {
      zsum(acc, v) += tri_area[ti] * g;
      wsum[v] += tri_area[ti];
    }
  }
  for (auto& [v, g] : acc) g /= wsum[v];
  return acc;
}

std::map<int, Mat3> SurfaceOperator::vertex_jacobian(const std::map<int, Vec3>& w) const {
  std::map<int, Mat3> acc;
  std::map<int, double> wsum;
  for (size_t ti = 0; ti < tris.size(); ++ti) {
    Mat3 g = tri_jacobian(w, static_cast<int>(ti));
    for (int v : tris[ti]) {
      zsum(acc, v) += tri_area[ti] * g;
      wsum[v] += tri_area[ti];
    }
  }
  for (auto& [v, g] : acc) g /= wsum[v];
  return acc;
}

double SurfaceOperator::integrate(const std::map<int, double>& f) const {
  double s = 0.0;
  for (int i = 0; i < n(); ++i) {
    auto it = f.find(vertices[i]);
    if (it != f.end()) s += lumped_mass[i] * it->second;
  }
  return s;
}

double tangential_stokes_residual(const SurfaceOperator& op, const SurfaceGeometry& geom,
                                  const std::map<int, double>& f,
                                  const std::map<int, Vec3>& v) {
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  for (size_t ti = 0; ti < op.tris.size(); ++ti) {
    const auto& t = op.tris[ti];
    Vec3 g = op.tri_gradient(f, static_cast<int>(ti));
    Mat3 jw = op.tri_jacobian(v, static_cast<int>(ti));
    double fbar = 0.0;
    Vec3 vbar = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      fbar += f.at(t[k]) / 3.0;
      vbar += v.at(t[k]) / 3.0;
    }
    double div_v = jw.trace();
    lhs += op.tri_area[ti] * (g.dot(vbar) + fbar * div_v);
    scale += op.tri_area[ti] * (std::abs(fbar * div_v) + g.norm() * vbar.norm());
  }
  for (int i = 0; i < op.n(); ++i) {
    int mv = op.vertices[i];
    auto itf = f.find(mv);
    auto itv = v.find(mv);
    if (itf == f.end() || itv == v.end()) continue;
    rhs +=
        op.lumped_mass[i] * geom.kappa_at(mv) * itf->second * itv->second.dot(geom.normal_at(mv));
  }
  return std::abs(lhs - rhs) / std::max(1e-30, std::max(std::abs(rhs), scale));
}

}  // namespace shapeopt
