#pragma once

#include <string>
#include <vector>

#include "eqs/types.hpp"

namespace eqs {

/// Cumulative wall time per phase, seconds.
struct PhaseTimers {
  double residual = 0;   // boundary lift + fused stiffness products + rhs vectors
  double solve = 0;      // PCG iterations (all systems)
  double setup = 0;      // global matrix assembly, matrix addition, preconditioner builds
  double estimator = 0;  // start-vector generation and feedback
};

/// Exact work counters; every linear solve increments exactly one
/// iteration counter and one solve counter.
struct SolveStats {
  long m_solves = 0;               // mass solves of the time-stepping path
  long pcg_iterations = 0;         // iterations of those solves
  long rho_solves = 0;             // loose mass solves inside spectral-radius estimation
  long rho_pcg_iterations = 0;
  long newton_linear_solves = 0;   // shifted-system solves of the implicit path
  long newton_pcg_iterations = 0;
  long precond_setups = 0;
  long assemblies = 0;             // global matrix assemblies
  long svd_count = 0;              // mirrored from the estimator
  PhaseTimers timers;
};

/// One mass solve of the multiple right-hand side sequence.
struct SolveRecord {
  double t = 0;
  std::string estimator_mode;
  int estimator_rank = 0;
  int iterations = 0;
  double initial_rel_residual = 0;
};

/// Semi-discrete system M dx/dt = F(t, x) with F(t, x) = b(t) - K(x) x on
/// the free dofs. Time integrators are written against this interface; the
/// FEM system and the scalar surrogates used in tests implement it.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;

  virtual int size() const = 0;

  /// f = M^-1 (b(t) - K(x) x); one mass solve.
  virtual void eval_rhs(double t, const Vec& x, Vec& f) = 0;

  /// r = b(t) - K(x) x, no mass solve.
  virtual void eval_residual(double t, const Vec& x, Vec& r) = 0;

  virtual void mass_apply(const Vec& v, Vec& y) const = 0;

  /// y = M^-1 K(x_state) v at loose tolerance (spectral-radius estimation).
  virtual void apply_minv_stiffness(double t, const Vec& x_state, const Vec& v, Vec& y) = 0;

  /// Solve (M + gdt K(z_lin)) delta = rhs. `refresh_precond` requests a new
  /// preconditioner for this shifted matrix (the implicit integrator asks
  /// once per time step and reuses it within the step).
  virtual void shifted_solve(double t, const Vec& z_lin, double gdt, const Vec& rhs, Vec& delta,
                             bool refresh_precond) = 0;

  SolveStats& stats() { return stats_; }
  const SolveStats& stats() const { return stats_; }

 protected:
  SolveStats stats_;
};

}  // namespace eqs
