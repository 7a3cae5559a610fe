#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace eqs {

/// Tetrahedral mesh: node coordinates in meters, 4-node connectivity, a
/// material region tag per tet, and named boundary node sets. Immutable
/// after construction; finalize() canonicalizes orientation and validates.
struct TetMesh {
  std::vector<std::array<double, 3>> nodes;
  std::vector<std::array<int, 4>> tets;
  std::vector<int> region_id;
  std::map<std::string, std::vector<int>> boundary_sets;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_tets() const { return static_cast<int>(tets.size()); }

  /// Signed volume of tet t (positive after finalize()).
  double tet_volume(int t) const;
  double total_volume() const;
  std::array<double, 3> tet_centroid(int t) const;

  /// Reorients inverted tets (swap of two nodes), sorts boundary sets, and
  /// validates: index ranges, non-degenerate tets, disjoint boundary sets.
  /// Throws GeometryError on violations that cannot be repaired.
  void finalize();
};

/// Region layering along z for generated box meshes: regions[k] is assigned
/// to tets whose centroid lies between z_planes[k-1] and z_planes[k]
/// (with z_planes implicitly bracketed by 0 and lz). regions must have
/// exactly z_planes.size() + 1 entries.
struct LayerSpec {
  std::vector<double> z_planes;
  std::vector<int> regions = {1};
};

/// Structured box mesh on [0,lx]x[0,ly]x[0,lz] with nx*ny*nz cells, each
/// split into 6 tets along the main diagonal (conforming across cells).
/// Boundary sets "ground" (z=0) and "hv" (z=lz) are populated.
TetMesh generate_box_mesh(int nx, int ny, int nz, double lx, double ly, double lz,
                          const LayerSpec& layers = {});

/// Node indices lying on the mesh surface (nodes of faces owned by one tet).
std::vector<int> surface_nodes(const TetMesh& mesh);

}  // namespace eqs
