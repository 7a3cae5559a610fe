#include "eqs/amg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "eqs/errors.hpp"
#include "eqs/preconditioners.hpp"

namespace eqs {

namespace {

// strong-connection adjacency (diagonal excluded)
std::vector<std::vector<int>> strength_graph(const CsrMatrix& a, double theta) {
  const Vec d = a.diagonal();
  std::vector<std::vector<int>> strong(a.n_rows);
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col_idx[k];
      if (j == i) continue;
      if (std::abs(a.values[k]) >= theta * std::sqrt(std::abs(d[i] * d[j])))
        strong[i].push_back(j);
    }
  return strong;
}

double estimate_lambda_max_scaled(const CsrMatrix& a) {
  const Vec d = a.diagonal();
  std::mt19937 rng(20240811u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec v(a.n_rows);
  for (int i = 0; i < a.n_rows; ++i) v[i] = uni(rng);
  v.normalize();
  double lambda = 1.0;
  Vec w;
  for (int it = 0; it < 10; ++it) {
    a.apply(v, w);
    for (int i = 0; i < a.n_rows; ++i) w[i] /= d[i];
    lambda = w.norm();
    if (lambda == 0.0) return 1.0;
    v = w / lambda;
  }
  return lambda;
}

}  // namespace

std::vector<int> aggregate(const CsrMatrix& a, double theta) {
  const auto strong = strength_graph(a, theta);
  const int n = a.n_rows;
  std::vector<int> agg(n, -1);
  int n_agg = 0;

  for (int i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    bool clean = true;
    for (int j : strong[i])
      if (agg[j] >= 0) {
        clean = false;
        break;
      }
    if (!clean || strong[i].empty()) continue;
    agg[i] = n_agg;
    for (int j : strong[i]) agg[j] = n_agg;
    ++n_agg;
  }

  for (int i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    int best = -1;
    double best_w = -1.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col_idx[k];
      if (j == i || agg[j] < 0) continue;
      const double w = std::abs(a.values[k]);
      if (w > best_w) {
        best_w = w;
        best = agg[j];
      }
    }
    if (best >= 0) agg[i] = best;
  }

  for (int i = 0; i < n; ++i)
    if (agg[i] < 0) agg[i] = n_agg++;
  return agg;
}

AmgPreconditioner::AmgPreconditioner(const CsrMatrix& a, const AmgParams& params)
    : params_(params) {
  if (a.n_rows != a.n_cols) throw std::invalid_argument("amg: matrix must be square");
  if (a.symmetry_error() > 1e-10)
    throw std::invalid_argument("amg: matrix is not symmetric");

  levels_.push_back({a, diagonal_positions(a), {}, {}});
  while (static_cast<int>(levels_.size()) < params_.max_levels &&
         levels_.back().A.n_rows > params_.coarse_limit) {
    const CsrMatrix& fine = levels_.back().A;
    const std::vector<int> agg = aggregate(fine, params_.strength_threshold);
    const int n_agg = *std::max_element(agg.begin(), agg.end()) + 1;
    if (n_agg >= fine.n_rows) break;  // coarsening stalled

    // tentative prolongation: unit-normalized indicator columns
    std::vector<int> agg_size(n_agg, 0);
    for (int id : agg) ++agg_size[id];
    CsrMatrix p_tent;
    p_tent.n_rows = fine.n_rows;
    p_tent.n_cols = n_agg;
    p_tent.row_ptr.resize(fine.n_rows + 1);
    p_tent.col_idx.resize(fine.n_rows);
    p_tent.values.resize(fine.n_rows);
    for (int i = 0; i < fine.n_rows; ++i) {
      p_tent.row_ptr[i] = i;
      p_tent.col_idx[i] = agg[i];
      p_tent.values[i] = 1.0 / std::sqrt(static_cast<double>(agg_size[agg[i]]));
    }
    p_tent.row_ptr[fine.n_rows] = fine.n_rows;

    // one damped-Jacobi smoothing pass: P = (I - omega D^-1 A) P_tent
    const double omega = params_.prolongation_omega / estimate_lambda_max_scaled(fine);
    CsrMatrix scaled = fine;
    const Vec d = fine.diagonal();
    for (int i = 0; i < fine.n_rows; ++i)
      for (int k = scaled.row_ptr[i]; k < scaled.row_ptr[i + 1]; ++k) {
        scaled.values[k] = -omega * scaled.values[k] / d[i];
        if (scaled.col_idx[k] == i) scaled.values[k] += 1.0;
      }
    CsrMatrix p = multiply(scaled, p_tent);

    CsrMatrix r = p.transposed();
    CsrMatrix coarse = multiply(r, multiply(fine, p));

    levels_.back().P = std::move(p);
    levels_.back().R = std::move(r);
    levels_.push_back({std::move(coarse), {}, {}, {}});
    levels_.back().diag_pos = diagonal_positions(levels_.back().A);
  }

  coarse_solver_.compute(levels_.back().A.to_dense());
  if (coarse_solver_.info() != Eigen::Success)
    throw NumericalError("amg: coarsest-level factorization failed");
}

void AmgPreconditioner::vcycle(size_t l, const Vec& r, Vec& z) const {
  const AmgLevel& lev = levels_[l];
  if (l + 1 == levels_.size()) {
    z = coarse_solver_.solve(r);
    return;
  }

  z.setZero(lev.A.n_rows);
  for (int s = 0; s < params_.smoother_sweeps; ++s) {
    gauss_seidel_forward(lev.A, lev.diag_pos, r, z);
    gauss_seidel_backward(lev.A, lev.diag_pos, r, z);
  }

  Vec az;
  lev.A.apply(z, az);
  Vec rc;
  lev.R.apply(r - az, rc);
  Vec zc;
  vcycle(l + 1, rc, zc);
  Vec pz;
  lev.P.apply(zc, pz);
  z += pz;

  for (int s = 0; s < params_.smoother_sweeps; ++s) {
    gauss_seidel_forward(lev.A, lev.diag_pos, r, z);
    gauss_seidel_backward(lev.A, lev.diag_pos, r, z);
  }
}

void AmgPreconditioner::apply(const Vec& r, Vec& z) const { vcycle(0, r, z); }

}  // namespace eqs
