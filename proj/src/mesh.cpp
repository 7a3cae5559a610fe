#include "eqs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "eqs/errors.hpp"

namespace eqs {

namespace {

double signed_volume(const std::array<double, 3>& a, const std::array<double, 3>& b,
                     const std::array<double, 3>& c, const std::array<double, 3>& d) {
  const double e1[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double e2[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const double e3[3] = {d[0] - a[0], d[1] - a[1], d[2] - a[2]};
  const double det = e1[0] * (e2[1] * e3[2] - e2[2] * e3[1]) -
                     e1[1] * (e2[0] * e3[2] - e2[2] * e3[0]) +
                     e1[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
  return det / 6.0;
}

double max_edge_length(const TetMesh& m, int t) {
  double h = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const auto& a = m.nodes[m.tets[t][i]];
      const auto& b = m.nodes[m.tets[t][j]];
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      h = std::max(h, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  return h;
}

}  // namespace

double TetMesh::tet_volume(int t) const {
  const auto& k = tets[t];
  return signed_volume(nodes[k[0]], nodes[k[1]], nodes[k[2]], nodes[k[3]]);
}

double TetMesh::total_volume() const {
  double v = 0.0;
  for (int t = 0; t < n_tets(); ++t) v += tet_volume(t);
  return v;
}

std::array<double, 3> TetMesh::tet_centroid(int t) const {
  std::array<double, 3> c = {0, 0, 0};
  for (int i = 0; i < 4; ++i)
    for (int d = 0; d < 3; ++d) c[d] += 0.25 * nodes[tets[t][i]][d];
  return c;
}

void TetMesh::finalize() {
  if (tets.empty()) throw GeometryError("mesh has no tetrahedra");
  if (region_id.size() != tets.size())
    throw GeometryError("region_id size does not match tet count");

  const int nn = n_nodes();
  for (int t = 0; t < n_tets(); ++t) {
    for (int i = 0; i < 4; ++i)
      if (tets[t][i] < 0 || tets[t][i] >= nn)
        throw GeometryError("tet " + std::to_string(t) + " references node out of range");
    double v = tet_volume(t);
    if (v < 0.0) {
      std::swap(tets[t][2], tets[t][3]);
      v = -v;
    }
    const double h = max_edge_length(*this, t);
    if (!(v > 1e-14 * h * h * h))
      throw GeometryError("tet " + std::to_string(t) + " is degenerate (volume " +
                          std::to_string(v) + ")");
  }

  std::map<int, std::string> owner;
  for (auto& [name, set] : boundary_sets) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    for (int n : set) {
      if (n < 0 || n >= nn)
        throw GeometryError("boundary set '" + name + "' references node out of range");
      auto [it, inserted] = owner.emplace(n, name);
      if (!inserted)
        throw GeometryError("boundary sets '" + it->second + "' and '" + name +
                            "' overlap at node " + std::to_string(n));
    }
  }
}

TetMesh generate_box_mesh(int nx, int ny, int nz, double lx, double ly, double lz,
                          const LayerSpec& layers) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw std::invalid_argument("generate_box_mesh: cell counts must be >= 1");
  if (!(lx > 0.0 && ly > 0.0 && lz > 0.0))
    throw std::invalid_argument("generate_box_mesh: extents must be positive");
  if (layers.regions.size() != layers.z_planes.size() + 1)
    throw std::invalid_argument("generate_box_mesh: need one region per layer");
  for (double z : layers.z_planes)
    if (!(z > 0.0 && z < lz))
      throw std::invalid_argument("generate_box_mesh: layer plane outside (0, lz)");

  TetMesh m;
  const auto node_id = [&](int i, int j, int k) {
    return (k * (ny + 1) + j) * (nx + 1) + i;
  };
  m.nodes.resize((nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.nodes[node_id(i, j, k)] = {lx * i / nx, ly * j / ny, lz * k / nz};

  // 6-tet split of each cell; all tets share the cell's main diagonal, so
  // face diagonals run min-corner to max-corner and neighbors conform.
  static const int paths[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int base[3] = {i, j, k};
        for (const auto& p : paths) {
          std::array<int, 4> tet;
          int pos[3] = {base[0], base[1], base[2]};
          tet[0] = node_id(pos[0], pos[1], pos[2]);
          for (int s = 0; s < 3; ++s) {
            ++pos[p[s]];
            tet[s + 1] = node_id(pos[0], pos[1], pos[2]);
          }
          m.tets.push_back(tet);
        }
      }

  m.region_id.resize(m.tets.size());
  for (int t = 0; t < m.n_tets(); ++t) {
    const double zc = m.tet_centroid(t)[2];
    size_t layer = 0;
    while (layer < layers.z_planes.size() && zc >= layers.z_planes[layer]) ++layer;
    m.region_id[t] = layers.regions[layer];
  }

  const double ztol = 1e-12 * lz;
  std::vector<int> ground, hv;
  for (int n = 0; n < m.n_nodes(); ++n) {
    if (std::abs(m.nodes[n][2]) <= ztol) ground.push_back(n);
    if (std::abs(m.nodes[n][2] - lz) <= ztol) hv.push_back(n);
  }
  m.boundary_sets["ground"] = std::move(ground);
  m.boundary_sets["hv"] = std::move(hv);

  m.finalize();
  return m;
}

std::vector<int> surface_nodes(const TetMesh& mesh) {
  std::map<std::array<int, 3>, int> face_count;
  static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& tet : mesh.tets)
    for (const auto& f : faces) {
      std::array<int, 3> key = {tet[f[0]], tet[f[1]], tet[f[2]]};
      std::sort(key.begin(), key.end());
      ++face_count[key];
    }
  std::set<int> out;
  for (const auto& [key, count] : face_count)
    if (count == 1) out.insert(key.begin(), key.end());
  return {out.begin(), out.end()};
}

}  // namespace eqs
