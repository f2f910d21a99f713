#include "shapeopt/gmsh_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace shapeopt {

namespace {

struct LineReader {
  std::istream& in;
  int lineno = 0;
  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError("gmsh parse error at line " + std::to_string(lineno) + ": " + what);
  }
};

}  // namespace

Mesh read_gmsh(std::istream& in, std::map<int, BoundaryRole> tag_roles) {
  LineReader rd{in};
  std::string line;
  Mesh mesh;
  std::map<long, int> node_id;  // gmsh node id -> index
  bool have_nodes = false, have_elements = false;

  while (rd.next(line)) {
    if (line == "$MeshFormat") {
      if (!rd.next(line)) rd.fail("truncated $MeshFormat");
      std::istringstream ss(line);
      double version;
      int ftype, dsize;
      if (!(ss >> version >> ftype >> dsize)) rd.fail("bad format line");
      if (version < 2.0 || version >= 3.0 || ftype != 0)
        rd.fail("only MSH 2.2 ASCII is supported");
      if (!rd.next(line) || line != "$EndMeshFormat") rd.fail("missing $EndMeshFormat");
    } else if (line == "$PhysicalNames") {
      if (!rd.next(line)) rd.fail("truncated $PhysicalNames");
      int n = std::stoi(line);
      for (int i = 0; i < n; ++i)
        if (!rd.next(line)) rd.fail("truncated $PhysicalNames");
      if (!rd.next(line) || line != "$EndPhysicalNames") rd.fail("missing $EndPhysicalNames");
    } else if (line == "$Nodes") {
      if (!rd.next(line)) rd.fail("truncated $Nodes");
      long n = 0;
      try {
        n = std::stol(line);
      } catch (...) {
        rd.fail("bad node count");
      }
      for (long i = 0; i < n; ++i) {
        if (!rd.next(line)) rd.fail("truncated $Nodes");
        std::istringstream ss(line);
        long id;
        double x, y, z;
        if (!(ss >> id >> x >> y >> z)) rd.fail("bad node line");
        node_id[id] = mesh.n_nodes();
        mesh.nodes.push_back(Vec3(x, y, z));
      }
      if (!rd.next(line) || line != "$EndNodes") rd.fail("missing $EndNodes");
      have_nodes = true;
    } else if (line == "$Elements") {
      if (!have_nodes) rd.fail("$Elements before $Nodes");
      if (!rd.next(line)) rd.fail("truncated $Elements");
      long n = 0;
      try {
        n = std::stol(line);
      } catch (...) {
        rd.fail("bad element count");
      }
      for (long i = 0; i < n; ++i) {
        if (!rd.next(line)) rd.fail("truncated $Elements");
        std::istringstream ss(line);
        long id;
        int type, ntags;
        if (!(ss >> id >> type >> ntags)) rd.fail("bad element line");
        std::vector<int> tags(ntags);
        for (int k = 0; k < ntags; ++k)
          if (!(ss >> tags[k])) rd.fail("bad element tags");
        int nn = 0;
        switch (type) {
          case 2: nn = 3; break;
          case 9: nn = 6; break;
          case 4: nn = 4; break;
          case 11: nn = 10; break;
          case 15: nn = 1; break;  // points: skipped
          case 1: nn = 2; break;   // lines: skipped
          default: rd.fail("unsupported element type " + std::to_string(type));
        }
        std::vector<int> nd(nn);
        for (int k = 0; k < nn; ++k) {
          long gid;
          if (!(ss >> gid)) rd.fail("bad element connectivity");
          auto it = node_id.find(gid);
          if (it == node_id.end()) rd.fail("element references unknown node");
          nd[k] = it->second;
        }
        if (type == 4 || type == 11) {
          std::array<int, 10> cl;
          cl.fill(-1);
          for (int k = 0; k < nn; ++k) cl[k] = nd[k];
          if (tet_volume(mesh.nodes[cl[0]], mesh.nodes[cl[1]], mesh.nodes[cl[2]],
                         mesh.nodes[cl[3]]) <= 0.0)
            throw MeshError("inverted cell in gmsh file (element id " + std::to_string(id) + ")");
          mesh.cells.push_back(cl);
          if (type == 11) mesh.degree = 2;
        } else if (type == 2 || type == 9) {
          if (tags.empty() || tags[0] == 0)
            rd.fail("boundary triangle without physical tag");
          Facet f;
          f.nodes.fill(-1);
          for (int k = 0; k < std::min(nn, 3); ++k) f.nodes[k] = nd[k];
          f.tag = tags[0];
        mesh.facets.push_back(f);
        }
      }
      if (!rd.next(line) || line != "$EndElements") rd.fail("missing $EndElements");
      have_elements = true;
    }
    // unknown sections are skipped silently up to their terminator
    else if (!line.empty() && line[0] == '$' && line.rfind("$End", 0) != 0) {
      std::string end = "$End" + line.substr(1);
      while (rd.next(line) && line != end) {
      }
    }
  }
  if (!have_nodes || !have_elements) throw MeshError("gmsh file missing $Nodes or $Elements");
  if (mesh.cells.empty()) throw MeshError("gmsh file contains no tetrahedra");

  // corner vertices must precede mid-edge nodes in our layout; renumber
  if (mesh.degree == 2) {
    std::vector<bool> is_corner(mesh.n_nodes(), false);
    for (const auto& cl : mesh.cells)
      for (int k = 0; k < 4; ++k) is_corner[cl[k]] = true;
    std::vector<int> perm(mesh.n_nodes(), -1);
    int next = 0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      if (is_corner[i]) perm[i] = next++;
    mesh.n_vertices = next;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      if (!is_corner[i]) perm[i] = next++;
    std::vector<Vec3> nodes(mesh.n_nodes());
    for (int i = 0; i < mesh.n_nodes(); ++i) nodes[perm[i]] = mesh.nodes[i];
    mesh.nodes = std::move(nodes);
    for (auto& cl : mesh.cells)
      for (int k = 0; k < 10; ++k) cl[k] = perm[cl[k]];
    for (auto& f : mesh.facets)
      for (int k = 0; k < 3; ++k) f.nodes[k] = perm[f.nodes[k]];
  } else {
    mesh.n_vertices = mesh.n_nodes();
  }

  if (tag_roles.empty()) {
    int min_tag = std::numeric_limits<int>::max();
    for (const auto& f : mesh.facets) min_tag = std::min(min_tag, f.tag);
    for (const auto& f : mesh.facets)
      tag_roles[f.tag] = (f.tag == min_tag) ? BoundaryRole::DIRICHLET : BoundaryRole::NEUMANN;
  }
  mesh.tag_map = std::move(tag_roles);
  link_facets(mesh);
  mesh.validate();
  return mesh;
}

Mesh read_gmsh(const std::string& path, std::map<int, BoundaryRole> tag_roles) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  return read_gmsh(in, std::move(tag_roles));
}

void write_gmsh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file: " + path);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.n_nodes() << "\n";
  char buf[160];
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%d %.16g %.16g %.16g\n", i + 1, mesh.nodes[i][0],
                  mesh.nodes[i][1], mesh.nodes[i][2]);
    out << buf;
  }
  out << "$EndNodes\n$Elements\n" << (mesh.n_cells() + static_cast<int>(mesh.facets.size()))
      << "\n";
  long id = 1;
  int tri_type = mesh.degree == 1 ? 2 : 9;
  int npf = mesh.nodes_per_facet();
  for (const auto& f : mesh.facets) {
    out << id++ << ' ' << tri_type << " 2 " << f.tag << ' ' << f.tag;
    for (int k = 0; k < npf; ++k) out << ' ' << f.nodes[k] + 1;
    out << '\n';
  }
  int tet_type = mesh.degree == 1 ? 4 : 11;
  int npc = mesh.nodes_per_cell();
  for (const auto& cl : mesh.cells) {
    out << id++ << ' ' << tet_type << " 2 1 1";
    for (int k = 0; k < npc; ++k) out << ' ' << cl[k] + 1;
    out << '\n';
  }
  out << "$EndElements\n";
}

}  // namespace shapeopt
