#include "eqs/msh_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "eqs/errors.hpp"

namespace eqs {

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& path) : is_(path), path_(path) {
    if (!is_) throw ParseError("cannot open mesh file: " + path);
  }

  /// Next non-empty line (trailing \r stripped). Throws naming `context` at EOF.
  std::string need(const std::string& context) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
      if (!line.empty()) return line;
    }
    throw ParseError("unexpected end of file in " + context, line_no_);
  }

  bool next(std::string& line) {
    while (std::getline(is_, line)) {
      ++line_no_;
      while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  long line_no() const { return line_no_; }

 private:
  std::ifstream is_;
  std::string path_;
  long line_no_ = 0;
};

long parse_count(const std::string& line, const std::string& section, long line_no) {
  try {
    size_t pos = 0;
    long n = std::stol(line, &pos);
    if (n < 0) throw std::invalid_argument("negative");
    return n;
  } catch (const std::exception&) {
    throw ParseError("bad count in " + section + ": '" + line + "'", line_no);
  }
}

}  // namespace

TetMesh load_msh(const std::string& path) {
  LineReader rd(path);

  std::string line = rd.need("$MeshFormat");
  if (line != "$MeshFormat")
    throw ParseError("expected $MeshFormat header, got '" + line + "'", rd.line_no());
  line = rd.need("$MeshFormat");
  {
    std::istringstream ss(line);
    std::string version;
    int file_type = -1, data_size = -1;
    ss >> version >> file_type >> data_size;
    if (version.rfind("2.2", 0) != 0 || file_type != 0)
      throw ParseError("unsupported mesh format '" + line + "' (need MSH 2.2 ASCII)",
                       rd.line_no());
  }
  if (rd.need("$MeshFormat") != "$EndMeshFormat")
    throw ParseError("expected $EndMeshFormat", rd.line_no());

  std::map<int, std::string> surface_names;  // dim-2 physical names
  std::map<long, int> node_of_id;
  TetMesh mesh;
  std::map<std::string, std::set<int>> sets;

  while (rd.next(line)) {
    if (line == "$PhysicalNames") {
      const long n = parse_count(rd.need("$PhysicalNames"), "$PhysicalNames", rd.line_no());
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(rd.need("$PhysicalNames"));
        int dim = 0, id = 0;
        ss >> dim >> id;
        std::string name;
        std::getline(ss, name);
        const auto a = name.find('"');
        const auto b = name.rfind('"');
        if (a == std::string::npos || b <= a)
          throw ParseError("malformed physical name '" + name + "'", rd.line_no());
        if (dim == 2) surface_names[id] = name.substr(a + 1, b - a - 1);
      }
      if (rd.need("$PhysicalNames") != "$EndPhysicalNames")
        throw ParseError("expected $EndPhysicalNames", rd.line_no());
    } else if (line == "$Nodes") {
      const long n = parse_count(rd.need("$Nodes"), "$Nodes", rd.line_no());
      mesh.nodes.reserve(n);
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(rd.need("$Nodes"));
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z))
          throw ParseError("malformed node line in $Nodes", rd.line_no());
        node_of_id[id] = mesh.n_nodes();
        mesh.nodes.push_back({x, y, z});
      }
      if (rd.need("$Nodes") != "$EndNodes")
        throw ParseError("expected $EndNodes", rd.line_no());
    } else if (line == "$Elements") {
      const long n = parse_count(rd.need("$Elements"), "$Elements", rd.line_no());
      const auto node = [&](long id) {
        auto it = node_of_id.find(id);
        if (it == node_of_id.end())
          throw ParseError("element references unknown node " + std::to_string(id),
                           rd.line_no());
        return it->second;
      };
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(rd.need("$Elements"));
        long id = 0;
        int type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags))
          throw ParseError("malformed element line in $Elements", rd.line_no());
        int phys = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag = 0;
          if (!(ss >> tag)) throw ParseError("missing element tag in $Elements", rd.line_no());
          if (t == 0) phys = tag;
        }
        if (type == 4) {
          long a, b, c, d;
          if (!(ss >> a >> b >> c >> d))
            throw ParseError("tetrahedron with missing nodes in $Elements", rd.line_no());
          mesh.tets.push_back({node(a), node(b), node(c), node(d)});
          mesh.region_id.push_back(phys);
        } else if (type == 2) {
          long a, b, c;
          if (!(ss >> a >> b >> c))
            throw ParseError("triangle with missing nodes in $Elements", rd.line_no());
          auto it = surface_names.find(phys);
          const std::string name =
              it != surface_names.end() ? it->second : "surface_" + std::to_string(phys);
          auto& s = sets[name];
          s.insert(node(a));
          s.insert(node(b));
          s.insert(node(c));
        }
        // other element types (points, lines, ...) are skipped
      }
      if (rd.need("$Elements") != "$EndElements")
        throw ParseError("expected $EndElements", rd.line_no());
    }
    // unknown sections are tolerated: skip until their $End marker
    else if (!line.empty() && line[0] == '$' && line.rfind("$End", 0) != 0) {
      const std::string end = "$End" + line.substr(1);
      std::string skip;
      while (rd.next(skip))
        if (skip == end) break;
    }
  }

  for (auto& [name, s] : sets) mesh.boundary_sets[name] = {s.begin(), s.end()};
  if (mesh.tets.empty()) throw GeometryError("mesh file contains no tetrahedra: " + path);
  mesh.finalize();
  return mesh;
}

void write_msh(const TetMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);

  // surface triangles per boundary set: faces owned by one tet with all
  // three nodes in the set
  std::map<std::array<int, 3>, int> face_count;
  static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& tet : mesh.tets)
    for (const auto& f : faces) {
      std::array<int, 3> key = {tet[f[0]], tet[f[1]], tet[f[2]]};
      std::sort(key.begin(), key.end());
      ++face_count[key];
    }

  std::vector<std::pair<std::string, std::vector<std::array<int, 3>>>> set_tris;
  for (const auto& [name, set] : mesh.boundary_sets) {
    std::set<int> members(set.begin(), set.end());
    std::vector<std::array<int, 3>> tris;
    for (const auto& [key, count] : face_count)
      if (count == 1 && members.count(key[0]) && members.count(key[1]) && members.count(key[2]))
        tris.push_back(key);
    set_tris.emplace_back(name, std::move(tris));
  }

  os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

  std::set<int> regions(mesh.region_id.begin(), mesh.region_id.end());
  os << "$PhysicalNames\n" << set_tris.size() + regions.size() << "\n";
  int surf_tag = 0;
  std::map<std::string, int> tag_of_set;
  for (const auto& [name, tris] : set_tris) {
    tag_of_set[name] = ++surf_tag;
    os << "2 " << surf_tag << " \"" << name << "\"\n";
  }
  for (int r : regions) os << "3 " << r << " \"region_" << r << "\"\n";
  os << "$EndPhysicalNames\n";

  char buf[160];
  os << "$Nodes\n" << mesh.n_nodes() << "\n";
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", n + 1, mesh.nodes[n][0],
                  mesh.nodes[n][1], mesh.nodes[n][2]);
    os << buf;
  }
  os << "$EndNodes\n";

  long n_elem = mesh.n_tets();
  for (const auto& [name, tris] : set_tris) n_elem += static_cast<long>(tris.size());
  os << "$Elements\n" << n_elem << "\n";
  long eid = 0;
  for (const auto& [name, tris] : set_tris)
    for (const auto& t : tris)
      os << ++eid << " 2 2 " << tag_of_set[name] << " " << tag_of_set[name] << " " << t[0] + 1
         << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  for (int t = 0; t < mesh.n_tets(); ++t)
    os << ++eid << " 4 2 " << mesh.region_id[t] << " " << mesh.region_id[t] << " "
       << mesh.tets[t][0] + 1 << " " << mesh.tets[t][1] + 1 << " " << mesh.tets[t][2] + 1 << " "
       << mesh.tets[t][3] + 1 << "\n";
  os << "$EndElements\n";
}

}  // namespace eqs
