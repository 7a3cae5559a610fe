#pragma once

#include <memory>

#include "eqs/amg.hpp"
#include "eqs/assembly.hpp"
#include "eqs/matfree.hpp"
#include "eqs/ode_system.hpp"
#include "eqs/start_vector.hpp"

namespace eqs {

enum class PrecondKind { Jacobi, Ssor, Amg };

struct LinearSolverParams {
  PrecondKind precond = PrecondKind::Amg;
  double rel_tol = 1e-12;
  int max_iter = 500;
  double rho_solve_tol = 1e-4;  // loose mass solves for spectral-radius estimation
  AmgParams amg;
};

/// The spatially discretized electro-quasistatic system on the free dofs:
///   M_II dx/dt = -M_IB dx_B/dt - (K(x) x)_I =: F(t, x).
/// The permittivity matrix M is assembled once and kept; its preconditioner
/// is built on first use and reused for every mass solve of the run. The
/// conductivity operator K(x) is never assembled on this path - it acts
/// through the fused element kernel. The implicit path assembles K(z) per
/// Newton iterate for its shifted system.
class FemSystem : public OdeSystem {
 public:
  FemSystem(const TetMesh& mesh, const DofMap& dm, const MaterialTable& materials,
            const BoundaryExcitation& excitation, const LinearSolverParams& solver,
            const EstimatorParams& estimator, int workers = 1);

  int size() const override { return dm_.n_free(); }
  void eval_rhs(double t, const Vec& x, Vec& f) override;
  void eval_residual(double t, const Vec& x, Vec& r) override;
  void mass_apply(const Vec& v, Vec& y) const override;
  void apply_minv_stiffness(double t, const Vec& x_state, const Vec& v, Vec& y) override;
  void shifted_solve(double t, const Vec& z_lin, double gdt, const Vec& rhs, Vec& delta,
                     bool refresh_precond) override;

  /// Full-dof vector with Dirichlet values of time t.
  Vec lift_full(double t, const Vec& x_free) const;

  const CsrMatrix& mass_full() const { return mass_full_; }
  const CsrMatrix& mass_free() const { return mass_.AII; }
  const DofMap& dofmap() const { return dm_; }
  const MatFreeStiffness& stiffness_operator() const { return matfree_; }
  StartVectorEstimator& estimator() { return estimator_; }

  std::vector<SolveRecord>& solve_records() { return solve_records_; }

 private:
  const LinearOperator& mass_preconditioner();
  std::unique_ptr<LinearOperator> make_preconditioner(const CsrMatrix& a);

  const TetMesh& mesh_;
  const DofMap& dm_;
  const MaterialTable& materials_;
  const BoundaryExcitation& excitation_;
  LinearSolverParams solver_;
  StartVectorEstimator estimator_;

  CsrMatrix mass_full_;
  DirichletBlocks mass_;
  MatFreeStiffness matfree_;
  std::unique_ptr<LinearOperator> mass_precond_;     // built lazily, then reused
  std::unique_ptr<LinearOperator> shifted_precond_;  // implicit path, per step

  std::vector<SolveRecord> solve_records_;
};

}  // namespace eqs
