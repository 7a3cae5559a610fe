#include "eqs/dofmap.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "eqs/errors.hpp"

namespace eqs {

void DofMap::lift(const Vec& x_free, const Vec& x_fixed, Vec& x_full) const {
  x_full.resize(n_dofs);
  for (int i = 0; i < n_free(); ++i) x_full[free_dofs[i]] = x_free[i];
  for (int i = 0; i < n_fixed(); ++i) x_full[fixed_dofs[i]] = x_fixed[i];
}

void DofMap::restrict_free(const Vec& x_full, Vec& x_free) const {
  x_free.resize(n_free());
  for (int i = 0; i < n_free(); ++i) x_free[i] = x_full[free_dofs[i]];
}

DofMap build_dof_map(const TetMesh& mesh, int order,
                     const std::vector<std::string>& dirichlet_sets) {
  if (order != 1 && order != 2) throw ConfigError("element order must be 1 or 2");

  DofMap dm;
  dm.order = order;
  dm.n_local = order == 1 ? 4 : 10;
  dm.dof_coords = mesh.nodes;

  std::map<std::pair<int, int>, int> edge_id;  // sorted node pair -> edge index
  dm.element_dofs.resize(mesh.n_tets());
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto& ed = dm.element_dofs[t];
    ed.fill(-1);
    for (int v = 0; v < 4; ++v) ed[v] = mesh.tets[t][v];
    if (order == 2) {
      for (int e = 0; e < 6; ++e) {
        int a = mesh.tets[t][kTetEdgeVertices[e][0]];
        int b = mesh.tets[t][kTetEdgeVertices[e][1]];
        if (a > b) std::swap(a, b);
        auto [it, inserted] = edge_id.try_emplace({a, b}, static_cast<int>(edge_id.size()));
        ed[4 + e] = mesh.n_nodes() + it->second;
      }
    }
  }
  dm.n_dofs = mesh.n_nodes() + static_cast<int>(edge_id.size());

  if (order == 2) {
    dm.dof_coords.resize(dm.n_dofs);
    for (const auto& [pair, id] : edge_id) {
      const auto& a = mesh.nodes[pair.first];
      const auto& b = mesh.nodes[pair.second];
      dm.dof_coords[mesh.n_nodes() + id] = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]),
                                            0.5 * (a[2] + b[2])};
    }
  }

  // node -> constrained set index
  std::vector<int> node_set(mesh.n_nodes(), -1);
  for (const auto& name : dirichlet_sets) {
    auto it = mesh.boundary_sets.find(name);
    if (it == mesh.boundary_sets.end())
      throw ConfigError("unknown boundary set '" + name + "'");
    const int set_idx = static_cast<int>(dm.set_names.size());
    dm.set_names.push_back(name);
    for (int n : it->second) node_set[n] = set_idx;
  }

  dm.fixed_set.assign(dm.n_dofs, -1);
  for (int n = 0; n < mesh.n_nodes(); ++n) dm.fixed_set[n] = node_set[n];
  if (order == 2) {
    for (const auto& [pair, id] : edge_id) {
      const int sa = node_set[pair.first], sb = node_set[pair.second];
      if (sa >= 0 && sa == sb) dm.fixed_set[mesh.n_nodes() + id] = sa;
    }
  }

  dm.free_index.assign(dm.n_dofs, -1);
  dm.fixed_index.assign(dm.n_dofs, -1);
  for (int d = 0; d < dm.n_dofs; ++d) {
    if (dm.fixed_set[d] >= 0) {
      dm.fixed_index[d] = static_cast<int>(dm.fixed_dofs.size());
      dm.fixed_dofs.push_back(d);
    } else {
      dm.free_index[d] = static_cast<int>(dm.free_dofs.size());
      dm.free_dofs.push_back(d);
    }
  }
  return dm;
}

}  // namespace eqs
