#include "eqs/matfree.hpp"

#include <omp.h>

#include <algorithm>

#include "eqs/errors.hpp"

namespace eqs {

std::vector<std::vector<int>> color_elements(const DofMap& dm, int n_tets) {
  const int n = dm.n_local;
  std::vector<std::vector<int>> tets_of_dof(dm.n_dofs);
  for (int t = 0; t < n_tets; ++t)
    for (int i = 0; i < n; ++i) tets_of_dof[dm.element_dofs[t][i]].push_back(t);

  std::vector<int> color(n_tets, -1);
  std::vector<int> used;
  int n_colors = 0;
  for (int t = 0; t < n_tets; ++t) {
    used.clear();
    for (int i = 0; i < n; ++i)
      for (int nb : tets_of_dof[dm.element_dofs[t][i]])
        if (color[nb] >= 0) used.push_back(color[nb]);
    std::sort(used.begin(), used.end());
    int c = 0;
    for (int u : used) {
      if (u == c) ++c;
      else if (u > c) break;
    }
    color[t] = c;
    n_colors = std::max(n_colors, c + 1);
  }

  std::vector<std::vector<int>> batches(n_colors);
  for (int t = 0; t < n_tets; ++t) batches[color[t]].push_back(t);
  return batches;
}

MatFreeStiffness::MatFreeStiffness(const TetMesh& mesh, const DofMap& dm,
                                   const MaterialTable& materials, int workers, Scatter scatter)
    : mesh_(mesh), dm_(dm), materials_(materials), workers_(std::max(1, workers)),
      scatter_(scatter) {
  material_of_tet_.resize(mesh.n_tets());
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto it = materials.find(mesh.region_id[t]);
    if (it == materials.end())
      throw ConfigError("no material for region " + std::to_string(mesh.region_id[t]));
    material_of_tet_[t] = &it->second;
  }
  if (scatter_ == Scatter::Colored) color_batches_ = color_elements(dm, mesh.n_tets());
}

namespace {

struct ElementScratch {
  double S[10][10];
  double kappa_at_qp[4];
  double x_loc[10];
  double v_loc[10];
  double y_loc[10];
};

// local kernel: K_e(x_state) * v_loc, one tet
inline void fused_element_product(const TetMesh& mesh, const DofMap& dm,
                                  const MaterialModel& mat, int t, const Vec& x_state,
                                  const Vec& v, ElementScratch& s) {
  const int n = dm.n_local;
  std::array<std::array<double, 3>, 4> coords;
  for (int vtx = 0; vtx < 4; ++vtx) coords[vtx] = mesh.nodes[mesh.tets[t][vtx]];
  const TetGeometry geo = tet_geometry(coords);

  for (int i = 0; i < n; ++i) {
    s.x_loc[i] = x_state[dm.element_dofs[t][i]];
    s.v_loc[i] = v[dm.element_dofs[t][i]];
  }
  for (int q = 0; q < quadrature_size(dm.order); ++q)
    s.kappa_at_qp[q] = kappa_of_e(mat, gradient_magnitude(geo, dm.order, q, s.x_loc));

  element_laplacian(geo, dm.order, s.kappa_at_qp, s.S);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += s.S[i][j] * s.v_loc[j];
    s.y_loc[i] = acc;
  }
}

}  // namespace

void MatFreeStiffness::apply(const Vec& x_state, const Vec& v, Vec& y) const {
  if (x_state.size() != dm_.n_dofs || v.size() != dm_.n_dofs)
    throw std::invalid_argument("MatFreeStiffness::apply: dimension mismatch");
  ++applies_;
  if (scatter_ == Scatter::Colored)
    apply_colored(x_state, v, y);
  else
    apply_private(x_state, v, y);
}

void MatFreeStiffness::apply_colored(const Vec& x_state, const Vec& v, Vec& y) const {
  const int n = dm_.n_local;
  y.setZero(dm_.n_dofs);
  for (const auto& batch : color_batches_) {
    const int m = static_cast<int>(batch.size());
#pragma omp parallel num_threads(workers_)
    {
      ElementScratch scratch;
#pragma omp for schedule(static)
      for (int k = 0; k < m; ++k) {
        const int t = batch[k];
        fused_element_product(mesh_, dm_, *material_of_tet_[t], t, x_state, v, scratch);
        // tets of one color share no dof: scatter is race-free
        for (int i = 0; i < n; ++i) y[dm_.element_dofs[t][i]] += scratch.y_loc[i];
      }
    }
  }
}

void MatFreeStiffness::apply_private(const Vec& x_state, const Vec& v, Vec& y) const {
  const int n = dm_.n_local;
  const int nt = mesh_.n_tets();
  std::vector<Vec> partial(workers_);
  for (Vec& p : partial) p.setZero(dm_.n_dofs);  // sized even if fewer threads run
#pragma omp parallel num_threads(workers_)
  {
    const int w = omp_get_thread_num();
    ElementScratch scratch;
#pragma omp for schedule(static)
    for (int t = 0; t < nt; ++t) {
      fused_element_product(mesh_, dm_, *material_of_tet_[t], t, x_state, v, scratch);
      for (int i = 0; i < n; ++i) partial[w][dm_.element_dofs[t][i]] += scratch.y_loc[i];
    }
  }
  y.setZero(dm_.n_dofs);
  for (int w = 0; w < workers_; ++w) y += partial[w];  // fixed reduction order
}

void MatFreeStiffness::residual(const Vec& x_full, const Vec& b_mass, Vec& r) const {
  Vec y;
  apply(x_full, x_full, y);
  r.resize(dm_.n_free());
  for (int i = 0; i < dm_.n_free(); ++i) r[i] = b_mass[i] - y[dm_.free_dofs[i]];
}

std::size_t MatFreeStiffness::scratch_bytes() const {
  std::size_t per_worker = sizeof(ElementScratch);
  if (scatter_ == Scatter::PrivateBuffers)
    per_worker += static_cast<std::size_t>(dm_.n_dofs) * sizeof(double);
  return static_cast<std::size_t>(workers_) * per_worker;
}

}  // namespace eqs
