#pragma once

#include <deque>
#include <string>
#include <vector>

#include "eqs/csr.hpp"
#include "eqs/types.hpp"

namespace eqs {

/// Modified Gram-Schmidt with column dropping: a candidate whose norm after
/// projection falls below drop_tol times its original norm is discarded.
/// Returns an n x m matrix with orthonormal columns (m may be zero).
Mat mgs_orthonormalize(const std::vector<Vec>& vectors, double drop_tol = 1e-8);

/// Galerkin start vector x0 = V [V' M V]^-1 V' b. Returns the zero vector
/// and sets *ok = false when the reduced matrix is numerically singular.
Vec spe_start(const Mat& v, const CsrMatrix& m, const Vec& b, bool* ok = nullptr);

/// Dominant left singular vectors of the snapshot matrix; at most `rank`
/// columns, truncated further at the numerical rank (sigma < 1e-12 sigma_max).
Mat pod_build(const Mat& snapshots, int rank);

enum class EstimatorMode { Zero, Previous, Spe, PodFixed, PodRolling };

const char* estimator_mode_name(EstimatorMode mode);

struct EstimatorParams {
  EstimatorMode mode = EstimatorMode::Zero;
  int spe_window = 8;
  int pod_snapshots = 40;     // PodFixed: solves collected before the basis is built
  int pod_rank = 10;
  int pod_capacity = 20;      // PodRolling: ring size
  double pod_threshold = 0;   // PodRolling: append when iterations exceed this;
                              // <= 0 selects 1.25x the running median
  double mgs_drop_tol = 1e-8;
};

/// Start-vector generator for the constant-matrix multiple right-hand side
/// sequence. One instance per simulation; next()/feedback() bracket every
/// solve. Degenerate states (no history, dropped basis, singular reduced
/// system) fall back to the zero start.
class StartVectorEstimator {
 public:
  struct Stats {
    long svd_count = 0;
    long appends = 0;
    long spe_fallbacks = 0;
  };

  explicit StartVectorEstimator(const EstimatorParams& params) : params_(params) {}

  /// Start vector for the next solve of M x = b.
  Vec next(const CsrMatrix& m, const Vec& b);

  /// Report the solve outcome; updates history / snapshot state.
  void feedback(const Vec& x, int iterations);

  EstimatorMode mode() const { return params_.mode; }
  int current_rank() const { return static_cast<int>(basis_.cols()); }
  const Stats& stats() const { return stats_; }

 private:
  Vec pod_start(const CsrMatrix& m, const Vec& b);
  void factor_reduced(const CsrMatrix& m);
  double rolling_threshold() const;

  EstimatorParams params_;
  Stats stats_;

  std::deque<Vec> history_;        // SPE window / Previous
  std::vector<Vec> snapshots_;     // POD snapshot columns
  int rolling_next_slot_ = 0;      // oldest-entry overwrite position
  bool basis_stale_ = false;
  bool fixed_basis_built_ = false;
  Mat basis_;                      // V
  Mat reduced_inverse_;            // (V' M V)^-1, cached for POD modes
  bool reduced_ok_ = false;
  std::vector<int> iteration_history_;
};

}  // namespace eqs
