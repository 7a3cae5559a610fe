#include "eqs/preconditioners.hpp"

#include "eqs/errors.hpp"

namespace eqs {

std::vector<int> diagonal_positions(const CsrMatrix& a) {
  std::vector<int> pos(a.n_rows, -1);
  for (int i = 0; i < a.n_rows; ++i) {
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col_idx[k] == i) {
        pos[i] = k;
        break;
      }
    if (pos[i] < 0 || a.values[pos[i]] == 0.0)
      throw NumericalError("matrix has a missing or zero diagonal entry at row " +
                           std::to_string(i));
  }
  return pos;
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& a) {
  inv_diag_ = a.diagonal();
  for (int i = 0; i < inv_diag_.size(); ++i) {
    if (inv_diag_[i] == 0.0) throw NumericalError("Jacobi: zero diagonal");
    inv_diag_[i] = 1.0 / inv_diag_[i];
  }
}

void JacobiPreconditioner::apply(const Vec& r, Vec& z) const {
  z = inv_diag_.cwiseProduct(r);
}

SsorPreconditioner::SsorPreconditioner(const CsrMatrix& a) : a_(a) {
  diag_pos_ = diagonal_positions(a_);
}

void SsorPreconditioner::apply(const Vec& r, Vec& z) const {
  const int n = a_.n_rows;
  // forward solve (D+L) y = r
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int k = a_.row_ptr[i]; k < a_.row_ptr[i + 1]; ++k) {
      const int j = a_.col_idx[k];
      if (j < i) s -= a_.values[k] * y[j];
    }
    y[i] = s / a_.values[diag_pos_[i]];
  }
  // backward solve (D+U) z = D y
  z.resize(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = a_.values[diag_pos_[i]] * y[i];
    for (int k = a_.row_ptr[i]; k < a_.row_ptr[i + 1]; ++k) {
      const int j = a_.col_idx[k];
      if (j > i) s -= a_.values[k] * z[j];
    }
    z[i] = s / a_.values[diag_pos_[i]];
  }
}

void gauss_seidel_forward(const CsrMatrix& a, const std::vector<int>& diag_pos, const Vec& b,
                          Vec& x) {
  for (int i = 0; i < a.n_rows; ++i) {
    double s = b[i];
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col_idx[k];
      if (j != i) s -= a.values[k] * x[j];
    }
    x[i] = s / a.values[diag_pos[i]];
  }
}

void gauss_seidel_backward(const CsrMatrix& a, const std::vector<int>& diag_pos, const Vec& b,
                           Vec& x) {
  for (int i = a.n_rows - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col_idx[k];
      if (j != i) s -= a.values[k] * x[j];
    }
    x[i] = s / a.values[diag_pos[i]];
  }
}

}  // namespace eqs
