#include "eqs/start_vector.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <iostream>

namespace eqs {

Mat mgs_orthonormalize(const std::vector<Vec>& vectors, double drop_tol) {
  if (vectors.empty()) return Mat(0, 0);
  const auto n = vectors.front().size();
  std::vector<Vec> basis;
  for (const Vec& cand : vectors) {
    const double norm0 = cand.norm();
    if (norm0 == 0.0) continue;
    Vec w = cand;
    for (const Vec& u : basis) w -= u.dot(w) * u;
    if (w.norm() <= drop_tol * norm0) continue;
    for (const Vec& u : basis) w -= u.dot(w) * u;  // second pass for orthogonality
    const double nrm = w.norm();
    if (nrm <= drop_tol * norm0) continue;
    basis.push_back(w / nrm);
  }
  Mat v(n, static_cast<int>(basis.size()));
  for (int c = 0; c < v.cols(); ++c) v.col(c) = basis[c];
  return v;
}

namespace {

/// (V' M V)^-1 as a dense matrix; ok=false when numerically singular.
Mat reduced_mass_inverse(const Mat& v, const CsrMatrix& m, bool& ok) {
  const int rank = static_cast<int>(v.cols());
  Mat w(v.rows(), rank);
  Vec tmp;
  for (int c = 0; c < rank; ++c) {
    m.apply(v.col(c), tmp);
    w.col(c) = tmp;
  }
  Mat g = v.transpose() * w;
  Eigen::LDLT<Mat> ldlt(g);
  const Vec d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  ok = ldlt.info() == Eigen::Success && dmax > 0.0 &&
       d.minCoeff() > 1e-14 * dmax;
  if (!ok) return Mat();
  return ldlt.solve(Mat::Identity(rank, rank));
}

}  // namespace

Vec spe_start(const Mat& v, const CsrMatrix& m, const Vec& b, bool* ok_out) {
  bool ok = v.cols() > 0;
  Vec x0 = Vec::Zero(b.size());
  if (ok) {
    const Mat g_inv = reduced_mass_inverse(v, m, ok);
    if (ok) x0 = v * (g_inv * (v.transpose() * b));
  }
  if (ok_out) *ok_out = ok;
  return x0;
}

Mat pod_build(const Mat& snapshots, int rank) {
  Eigen::JacobiSVD<Mat> svd(snapshots, Eigen::ComputeThinU);
  const Vec sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma[0] == 0.0) return Mat(snapshots.rows(), 0);
  int keep = 0;
  while (keep < sigma.size() && keep < rank && sigma[keep] > 1e-12 * sigma[0]) ++keep;
  return svd.matrixU().leftCols(keep);
}

const char* estimator_mode_name(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::Zero: return "zero";
    case EstimatorMode::Previous: return "previous";
    case EstimatorMode::Spe: return "spe";
    case EstimatorMode::PodFixed: return "pod_fixed";
    case EstimatorMode::PodRolling: return "pod_rolling";
  }
  return "?";
}

Vec StartVectorEstimator::next(const CsrMatrix& m, const Vec& b) {
  switch (params_.mode) {
    case EstimatorMode::Zero:
      return Vec::Zero(b.size());
    case EstimatorMode::Previous:
      return history_.empty() ? Vec(Vec::Zero(b.size())) : history_.back();
    case EstimatorMode::Spe: {
      if (history_.empty()) return Vec::Zero(b.size());
      const Mat v = mgs_orthonormalize({history_.begin(), history_.end()},
                                       params_.mgs_drop_tol);
      basis_ = v;
      if (v.cols() == 0) return Vec::Zero(b.size());  // empty-basis signal
      bool ok = false;
      Vec x0 = spe_start(v, m, b, &ok);
      if (!ok) {
        ++stats_.spe_fallbacks;
        std::cerr << "start_vector: singular reduced system, zero start used\n";
      }
      return x0;
    }
    case EstimatorMode::PodFixed:
    case EstimatorMode::PodRolling:
      return pod_start(m, b);
  }
  return Vec::Zero(b.size());
}

Vec StartVectorEstimator::pod_start(const CsrMatrix& m, const Vec& b) {
  if (params_.mode == EstimatorMode::PodFixed && !fixed_basis_built_ &&
      static_cast<int>(snapshots_.size()) >= params_.pod_snapshots) {
    Mat s(b.size(), static_cast<int>(snapshots_.size()));
    for (int c = 0; c < s.cols(); ++c) s.col(c) = snapshots_[c];
    basis_ = pod_build(s, params_.pod_rank);
    ++stats_.svd_count;
    fixed_basis_built_ = true;
    factor_reduced(m);
  }
  if (params_.mode == EstimatorMode::PodRolling && basis_stale_ && !snapshots_.empty()) {
    Mat s(b.size(), static_cast<int>(snapshots_.size()));
    for (int c = 0; c < s.cols(); ++c) s.col(c) = snapshots_[c];
    basis_ = pod_build(s, params_.pod_rank);
    ++stats_.svd_count;
    basis_stale_ = false;
    factor_reduced(m);
  }
  if (basis_.cols() == 0 || !reduced_ok_) return Vec::Zero(b.size());
  return basis_ * (reduced_inverse_ * (basis_.transpose() * b));
}

void StartVectorEstimator::factor_reduced(const CsrMatrix& m) {
  reduced_ok_ = basis_.cols() > 0;
  if (!reduced_ok_) return;  // empty-basis signal, zero start without noise
  reduced_inverse_ = reduced_mass_inverse(basis_, m, reduced_ok_);
  if (!reduced_ok_) {
    ++stats_.spe_fallbacks;
    std::cerr << "start_vector: singular reduced system, zero start used\n";
  }
}

double StartVectorEstimator::rolling_threshold() const {
  if (params_.pod_threshold > 0.0) return params_.pod_threshold;
  if (iteration_history_.empty()) return -1.0;  // always append while empty
  std::vector<int> h = iteration_history_;
  const size_t mid = h.size() / 2;
  std::nth_element(h.begin(), h.begin() + mid, h.end());
  return 1.25 * static_cast<double>(h[mid]);
}

void StartVectorEstimator::feedback(const Vec& x, int iterations) {
  switch (params_.mode) {
    case EstimatorMode::Zero:
      break;
    case EstimatorMode::Previous:
      history_.clear();
      history_.push_back(x);
      break;
    case EstimatorMode::Spe:
      history_.push_back(x);
      while (static_cast<int>(history_.size()) > params_.spe_window) history_.pop_front();
      ++stats_.appends;
      break;
    case EstimatorMode::PodFixed:
      if (!fixed_basis_built_ && static_cast<int>(snapshots_.size()) < params_.pod_snapshots) {
        snapshots_.push_back(x);
        ++stats_.appends;
      }
      break;
    case EstimatorMode::PodRolling: {
      const double thr = rolling_threshold();
      if (static_cast<double>(iterations) > thr) {
        if (static_cast<int>(snapshots_.size()) < params_.pod_capacity) {
          snapshots_.push_back(x);
        } else {
          snapshots_[rolling_next_slot_] = x;  // overwrite the oldest
          rolling_next_slot_ = (rolling_next_slot_ + 1) % params_.pod_capacity;
        }
        ++stats_.appends;
        basis_stale_ = true;
      }
      break;
    }
  }
  iteration_history_.push_back(iterations);
}

}  // namespace eqs
