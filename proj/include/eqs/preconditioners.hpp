#pragma once

#include "eqs/csr.hpp"
#include "eqs/pcg.hpp"

namespace eqs {

/// z_i = r_i / a_ii
class JacobiPreconditioner final : public LinearOperator {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& a);
  int rows() const override { return static_cast<int>(inv_diag_.size()); }
  void apply(const Vec& r, Vec& z) const override;

 private:
  Vec inv_diag_;
};

/// Symmetric Gauss-Seidel / SSOR(1): z = (D+U)^-1 D (D+L)^-1 r.
/// Keeps a copy of the matrix; immutable and shareable after construction.
class SsorPreconditioner final : public LinearOperator {
 public:
  explicit SsorPreconditioner(const CsrMatrix& a);
  int rows() const override { return a_.n_rows; }
  void apply(const Vec& r, Vec& z) const override;

 private:
  CsrMatrix a_;
  std::vector<int> diag_pos_;
};

/// One forward Gauss-Seidel sweep x <- x + (D+L)^-1 (b - A x), in place.
void gauss_seidel_forward(const CsrMatrix& a, const std::vector<int>& diag_pos, const Vec& b,
                          Vec& x);
/// Backward sweep (reverse row order).
void gauss_seidel_backward(const CsrMatrix& a, const std::vector<int>& diag_pos, const Vec& b,
                           Vec& x);

/// Positions of the diagonal entries in each CSR row (entry must exist).
std::vector<int> diagonal_positions(const CsrMatrix& a);

}  // namespace eqs
