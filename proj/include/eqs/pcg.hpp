#pragma once

#include <functional>

#include "eqs/csr.hpp"
#include "eqs/types.hpp"

namespace eqs {

/// Abstract symmetric operator: y = A x. Both explicit CSR matrices and
/// matrix-free callbacks plug in with identical semantics.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int rows() const = 0;
  virtual void apply(const Vec& x, Vec& y) const = 0;
};

class CsrOperator final : public LinearOperator {
 public:
  explicit CsrOperator(const CsrMatrix& a) : a_(a) {}
  int rows() const override { return a_.n_rows; }
  void apply(const Vec& x, Vec& y) const override { a_.apply(x, y); }

 private:
  const CsrMatrix& a_;
};

class FunctionOperator final : public LinearOperator {
 public:
  FunctionOperator(int n, std::function<void(const Vec&, Vec&)> fn)
      : n_(n), fn_(std::move(fn)) {}
  int rows() const override { return n_; }
  void apply(const Vec& x, Vec& y) const override { fn_(x, y); }

 private:
  int n_;
  std::function<void(const Vec&, Vec&)> fn_;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(int n) : n_(n) {}
  int rows() const override { return n_; }
  void apply(const Vec& x, Vec& y) const override { y = x; }

 private:
  int n_;
};

struct PcgResult {
  Vec x;
  int iterations = 0;          // A-applications after the initial residual
  double rel_residual = 0.0;   // ||b - A x|| / ||b|| by recurrence
  double initial_rel_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients with stopping rule
/// ||b - A x||_2 <= rel_tol * ||b||_2 (relative to the right-hand side, so a
/// good start vector can terminate at zero iterations). Throws
/// NumericalError on non-finite values or an indefinite operator.
PcgResult pcg_solve(const LinearOperator& a, const LinearOperator& precond, const Vec& b,
                    const Vec& x0, double rel_tol, int max_iter);

}  // namespace eqs
