#pragma once

#include <cstddef>
#include <vector>

#include "eqs/assembly.hpp"
#include "eqs/dofmap.hpp"
#include "eqs/materials.hpp"
#include "eqs/mesh.hpp"

namespace eqs {

/// Fused per-element assembly and multiply: y = K(x_state) * v without a
/// global stiffness matrix. Each worker builds one tet's local matrix in
/// private storage, multiplies it with the gathered entries of v, and
/// scatters the local result. Race-free scatter uses a precomputed element
/// coloring (no two tets of one color share a dof), which also makes the
/// accumulation order - and thus the result - independent of the worker
/// count. A private-buffer reduction is kept as a correctness fallback.
class MatFreeStiffness {
 public:
  enum class Scatter { Colored, PrivateBuffers };

  MatFreeStiffness(const TetMesh& mesh, const DofMap& dm, const MaterialTable& materials,
                   int workers = 1, Scatter scatter = Scatter::Colored);

  /// y = K(x_state) v on the full dof set.
  void apply(const Vec& x_state, const Vec& v, Vec& y) const;

  /// r = b_mass - (K(x_full) x_full) restricted to free dofs, with b_mass the
  /// mass-rate boundary load -M_IB dx_B/dt. The Dirichlet-column product
  /// K_IB x_B comes out of the same element kernel via the full-dof x.
  void residual(const Vec& x_full, const Vec& b_mass, Vec& r) const;

  int n_colors() const { return static_cast<int>(color_batches_.size()); }
  int workers() const { return workers_; }

  /// Worker-local scratch footprint of one apply call, in bytes. Independent
  /// of the mesh size (colored scatter); grows with the dof count only in
  /// the private-buffer fallback.
  std::size_t scratch_bytes() const;

  long applies() const { return applies_; }

 private:
  void apply_colored(const Vec& x_state, const Vec& v, Vec& y) const;
  void apply_private(const Vec& x_state, const Vec& v, Vec& y) const;

  const TetMesh& mesh_;
  const DofMap& dm_;
  const MaterialTable& materials_;
  int workers_;
  Scatter scatter_;
  std::vector<const MaterialModel*> material_of_tet_;
  std::vector<std::vector<int>> color_batches_;
  mutable long applies_ = 0;
};

/// Greedy element coloring: tets sharing a dof get different colors.
/// Returned batches are ascending tet-id lists per color.
std::vector<std::vector<int>> color_elements(const DofMap& dm, int n_tets);

}  // namespace eqs
