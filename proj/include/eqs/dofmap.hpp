#pragma once

#include <array>
#include <string>
#include <vector>

#include "eqs/mesh.hpp"
#include "eqs/types.hpp"

namespace eqs {

/// Local edge numbering of the 10-node tet: edge e connects vertices
/// kTetEdgeVertices[e][0..1] and carries local dof 4 + e.
inline constexpr int kTetEdgeVertices[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                               {1, 2}, {1, 3}, {2, 3}};

/// Lagrange degrees of freedom on a tet mesh: order 1 has one dof per node,
/// order 2 adds one dof per unique edge (midpoint). Dofs are partitioned
/// into the free set I and the Dirichlet set B; a dof is in B when its node
/// belongs to a constrained boundary set, or (order 2) when both edge
/// endpoints belong to the same constrained set.
struct DofMap {
  int order = 1;
  int n_dofs = 0;
  int n_local = 4;  // dofs per element: 4 (order 1) or 10 (order 2)

  std::vector<std::array<double, 3>> dof_coords;
  std::vector<std::array<int, 10>> element_dofs;  // first n_local entries used

  std::vector<int> free_dofs;            // I, ascending
  std::vector<int> fixed_dofs;           // B, ascending
  std::vector<int> free_index;           // dof -> position in free_dofs, or -1
  std::vector<int> fixed_index;          // dof -> position in fixed_dofs, or -1
  std::vector<int> fixed_set;            // dof -> constrained set index, or -1
  std::vector<std::string> set_names;    // constrained boundary sets, by index

  int n_free() const { return static_cast<int>(free_dofs.size()); }
  int n_fixed() const { return static_cast<int>(fixed_dofs.size()); }

  /// Scatter a free-dof vector and Dirichlet values into a full-dof vector.
  void lift(const Vec& x_free, const Vec& x_fixed, Vec& x_full) const;
  /// Gather the free entries of a full-dof vector.
  void restrict_free(const Vec& x_full, Vec& x_free) const;
};

/// Build the dof map; `dirichlet_sets` names boundary sets of the mesh whose
/// dofs are constrained. Throws ConfigError for unknown set names.
DofMap build_dof_map(const TetMesh& mesh, int order,
                     const std::vector<std::string>& dirichlet_sets);

}  // namespace eqs
