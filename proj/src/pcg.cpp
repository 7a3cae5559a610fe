#include "eqs/pcg.hpp"

#include <cmath>

#include "eqs/errors.hpp"

namespace eqs {

PcgResult pcg_solve(const LinearOperator& a, const LinearOperator& precond, const Vec& b,
                    const Vec& x0, double rel_tol, int max_iter) {
  const int n = a.rows();
  if (b.size() != n || (x0.size() != 0 && x0.size() != n))
    throw std::invalid_argument("pcg_solve: dimension mismatch");

  PcgResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x = Vec::Zero(n);
    res.converged = true;
    return res;
  }

  res.x = x0.size() == n ? x0 : Vec::Zero(n);
  Vec r(n), q(n), z(n);
  if (x0.size() == n && x0.squaredNorm() != 0.0) {
    a.apply(res.x, q);
    r = b - q;
  } else {
    r = b;
  }

  double rel = r.norm() / bnorm;
  res.initial_rel_residual = rel;
  res.rel_residual = rel;
  if (!std::isfinite(rel)) throw NumericalError("pcg: non-finite initial residual");
  if (rel <= rel_tol) {
    res.converged = true;
    return res;
  }

  precond.apply(r, z);
  Vec p = z;
  double rz = r.dot(z);
  if (!std::isfinite(rz)) throw NumericalError("pcg: non-finite preconditioned residual");

  for (int k = 1; k <= max_iter; ++k) {
    a.apply(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0) || !std::isfinite(pq))
      throw NumericalError("pcg: operator not positive definite (p'Ap = " +
                           std::to_string(pq) + ")");
    const double alpha = rz / pq;
    res.x += alpha * p;
    r -= alpha * q;

    rel = r.norm() / bnorm;
    res.iterations = k;
    res.rel_residual = rel;
    if (!std::isfinite(rel)) throw NumericalError("pcg: non-finite residual");
    if (rel <= rel_tol) {
      res.converged = true;
      return res;
    }

    precond.apply(r, z);
    const double rz_new = r.dot(z);
    if (!std::isfinite(rz_new)) throw NumericalError("pcg: non-finite preconditioned residual");
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;  // max_iter reached; caller decides
}

}  // namespace eqs
