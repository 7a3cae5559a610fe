#pragma once

#include <Eigen/Cholesky>
#include <memory>
#include <vector>

#include "eqs/csr.hpp"
#include "eqs/pcg.hpp"

namespace eqs {

struct AmgParams {
  double strength_threshold = 0.08;  // |a_ij| >= theta sqrt(a_ii a_jj)
  double prolongation_omega = 4.0 / 3.0;  // times 1/lambda_max(D^-1 A)
  int smoother_sweeps = 1;           // symmetric Gauss-Seidel sweeps pre and post
  int max_levels = 10;
  int coarse_limit = 64;             // dense-solve size
};

struct AmgLevel {
  CsrMatrix A;
  std::vector<int> diag_pos;
  CsrMatrix P;  // prolongation to this level's fine grid (absent on the finest)
  CsrMatrix R;  // exact transpose of P
};

/// Greedy aggregation on the strength graph; returns the aggregate id of
/// every row (pass 1 seeds around unclaimed strong neighborhoods, pass 2
/// attaches leftovers to their strongest neighbor, pass 3 isolates).
std::vector<int> aggregate(const CsrMatrix& a, double strength_threshold);

/// Smoothed-aggregation algebraic multigrid, used as an SPD V-cycle
/// preconditioner: piecewise-constant tentative prolongation from the
/// near-kernel vector 1, one damped-Jacobi smoothing pass (omega =
/// 2/3 / lambda_max(D^-1 A)), Galerkin coarse operators, symmetric
/// Gauss-Seidel smoothing and a dense factorization of the coarsest level.
/// Setup is deterministic; the hierarchy is immutable and shareable.
class AmgPreconditioner final : public LinearOperator {
 public:
  AmgPreconditioner(const CsrMatrix& a, const AmgParams& params = {});

  int rows() const override { return levels_.front().A.n_rows; }
  /// One symmetric V-cycle.
  void apply(const Vec& r, Vec& z) const override;

  int n_levels() const { return static_cast<int>(levels_.size()); }
  const AmgLevel& level(int l) const { return levels_[l]; }

 private:
  void vcycle(size_t l, const Vec& r, Vec& z) const;

  AmgParams params_;
  std::vector<AmgLevel> levels_;
  Eigen::LDLT<Mat> coarse_solver_;
};

}  // namespace eqs
