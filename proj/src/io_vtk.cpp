#include "shapeopt/io_vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shapeopt {

void VtkFields::add_scalar(const std::string& name, const Mesh& mesh,
                           const std::map<int, double>& values, bool log_scale) {
  std::vector<double> v(mesh.n_nodes(), 0.0);
  for (const auto& [node, val] : values)
    v[node] = log_scale ? std::log10(std::max(val, 1e-300)) : val;
  scalars.emplace_back(name, std::move(v));
}

void VtkFields::add_vector(const std::string& name, const DisplacementField& u) {
  std::vector<Vec3> v(u.coeffs.size() / 3);
  for (size_t i = 0; i < v.size(); ++i) v[i] = u.at_node(static_cast<int>(i));
  vectors.emplace_back(name, std::move(v));
}

void write_vtk(const std::string& path, const Mesh& mesh, const VtkFields& fields) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write VTK file: " + path);
  char buf[256];
  out << "# vtk DataFile Version 3.0\nshapeopt output\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& x : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.9e %.9e %.9e\n", x[0], x[1], x[2]);
    out << buf;
  }
  int npc = mesh.nodes_per_cell();
  out << "CELLS " << mesh.n_cells() << ' ' << mesh.n_cells() * (npc + 1) << "\n";
  for (const auto& cl : mesh.cells) {
    out << npc;
    if (mesh.degree == 1) {
      for (int k = 0; k < 4; ++k) out << ' ' << cl[k];
    } else {
      // quadratic tets swap the last two mid-edge nodes relative to our
      // cell-edge ordering
      const int order[10] = {0, 1, 2, 3, 4, 5, 6, 7, 9, 8};
      for (int k = 0; k < 10; ++k) out << ' ' << cl[order[k]];
    }
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  int ct = mesh.degree == 1 ? 10 : 24;
  for (int c = 0; c < mesh.n_cells(); ++c) out << ct << "\n";
  if (!fields.scalars.empty() || !fields.vectors.empty()) {
    out << "POINT_DATA " << mesh.n_nodes() << "\n";
    for (const auto& [name, v] : fields.vectors) {
      out << "VECTORS " << name << " double\n";
      for (const auto& x : v) {
        std::snprintf(buf, sizeof buf, "%.9e %.9e %.9e\n", x[0], x[1], x[2]);
        out << buf;
      }
    }
    for (const auto& [name, v] : fields.scalars) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.9e\n", x);
        out << buf;
      }
    }
  }
}

VtkMesh read_vtk_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read VTK file: " + path);
  VtkMesh m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "POINTS") {
      int n;
      ss >> n;
      m.points.resize(n);
      for (int i = 0; i < n; ++i) in >> m.points[i][0] >> m.points[i][1] >> m.points[i][2];
    } else if (kw == "CELLS") {
      int n, total;
      ss >> n >> total;
      m.cells.resize(n);
      for (int i = 0; i < n; ++i) {
        int k;
        in >> k;
        m.cells[i].resize(k);
        for (int j = 0; j < k; ++j) in >> m.cells[i][j];
      }
    }
  }
  return m;
}

}  // namespace shapeopt
