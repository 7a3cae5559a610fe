#pragma once

#include <array>
#include <optional>

#include "eqs/dofmap.hpp"
#include "eqs/mesh.hpp"
#include "eqs/types.hpp"

namespace eqs {

/// Containing tet and barycentric coordinates of a point (brute-force scan;
/// meshes here are desk scale). Empty when the point is outside the mesh.
struct PointLocation {
  int tet = -1;
  std::array<double, 4> lambda = {0, 0, 0, 0};
};
std::optional<PointLocation> locate_point(const TetMesh& mesh,
                                          const std::array<double, 3>& p);

/// Interpolate a full-dof potential at a point via the element shape functions.
double interpolate(const DofMap& dm, const Vec& x_full, const PointLocation& loc);

}  // namespace eqs
