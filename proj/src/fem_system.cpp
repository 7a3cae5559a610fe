#include "eqs/fem_system.hpp"

#include <chrono>

#include "eqs/errors.hpp"
#include "eqs/preconditioners.hpp"

namespace eqs {

namespace {

class PhaseTimer {
 public:
  explicit PhaseTimer(double& slot)
      : slot_(slot), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    slot_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  double& slot_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

FemSystem::FemSystem(const TetMesh& mesh, const DofMap& dm, const MaterialTable& materials,
                     const BoundaryExcitation& excitation, const LinearSolverParams& solver,
                     const EstimatorParams& estimator, int workers)
    : mesh_(mesh), dm_(dm), materials_(materials), excitation_(excitation), solver_(solver),
      estimator_(estimator), matfree_(mesh, dm, materials, workers) {
  PhaseTimer timer(stats_.timers.setup);
  mass_full_ = assemble_mass(mesh_, dm_, materials_);
  ++stats_.assemblies;
  mass_ = split_dirichlet(mass_full_, dm_);
}

std::unique_ptr<LinearOperator> FemSystem::make_preconditioner(const CsrMatrix& a) {
  ++stats_.precond_setups;
  switch (solver_.precond) {
    case PrecondKind::Jacobi: return std::make_unique<JacobiPreconditioner>(a);
    case PrecondKind::Ssor: return std::make_unique<SsorPreconditioner>(a);
    case PrecondKind::Amg: return std::make_unique<AmgPreconditioner>(a, solver_.amg);
  }
  throw ConfigError("unknown preconditioner kind");
}

const LinearOperator& FemSystem::mass_preconditioner() {
  if (!mass_precond_) {
    PhaseTimer timer(stats_.timers.setup);
    mass_precond_ = make_preconditioner(mass_.AII);
  }
  return *mass_precond_;
}

Vec FemSystem::lift_full(double t, const Vec& x_free) const {
  Vec full;
  dm_.lift(x_free, excitation_.boundary_values(dm_, t), full);
  return full;
}

void FemSystem::eval_residual(double t, const Vec& x, Vec& r) {
  PhaseTimer timer(stats_.timers.residual);
  const Vec x_full = lift_full(t, x);
  const Vec b_mass = -mass_.AIB.apply(excitation_.boundary_rates(dm_, t));
  matfree_.residual(x_full, b_mass, r);
}

void FemSystem::eval_rhs(double t, const Vec& x, Vec& f) {
  Vec r;
  eval_residual(t, x, r);

  const LinearOperator& precond = mass_preconditioner();
  Vec x0;
  {
    PhaseTimer timer(stats_.timers.estimator);
    x0 = estimator_.next(mass_.AII, r);
  }
  PcgResult res;
  {
    PhaseTimer timer(stats_.timers.solve);
    CsrOperator op(mass_.AII);
    res = pcg_solve(op, precond, r, x0, solver_.rel_tol, solver_.max_iter);
  }
  if (!res.converged)
    throw NumericalError("mass solve failed to converge (relative residual " +
                         std::to_string(res.rel_residual) + ")");
  {
    PhaseTimer timer(stats_.timers.estimator);
    estimator_.feedback(res.x, res.iterations);
  }
  ++stats_.m_solves;
  stats_.pcg_iterations += res.iterations;
  stats_.svd_count = estimator_.stats().svd_count;
  solve_records_.push_back({t, estimator_mode_name(estimator_.mode()),
                            estimator_.current_rank(), res.iterations,
                            res.initial_rel_residual});
  f = std::move(res.x);
}

void FemSystem::mass_apply(const Vec& v, Vec& y) const { mass_.AII.apply(v, y); }

void FemSystem::apply_minv_stiffness(double t, const Vec& x_state, const Vec& v, Vec& y) {
  Vec kv_full;
  {
    PhaseTimer timer(stats_.timers.residual);
    const Vec x_full = lift_full(t, x_state);
    Vec v_full;
    dm_.lift(v, Vec::Zero(dm_.n_fixed()), v_full);
    matfree_.apply(x_full, v_full, kv_full);
  }
  Vec kv;
  dm_.restrict_free(kv_full, kv);

  const LinearOperator& precond = mass_preconditioner();
  PhaseTimer timer(stats_.timers.solve);
  CsrOperator op(mass_.AII);
  PcgResult res = pcg_solve(op, precond, kv, Vec(), solver_.rho_solve_tol, solver_.max_iter);
  ++stats_.rho_solves;
  stats_.rho_pcg_iterations += res.iterations;
  y = std::move(res.x);
}

void FemSystem::shifted_solve(double t, const Vec& z_lin, double gdt, const Vec& rhs,
                              Vec& delta, bool refresh_precond) {
  CsrMatrix shifted;
  {
    PhaseTimer timer(stats_.timers.setup);
    const Vec z_full = lift_full(t, z_lin);
    const CsrMatrix k_full = assemble_stiffness(mesh_, dm_, materials_, z_full);
    ++stats_.assemblies;
    const CsrMatrix k_ii = extract_block(k_full, dm_.free_dofs, dm_.free_dofs);
    shifted = add(1.0, mass_.AII, gdt, k_ii);
    if (refresh_precond || !shifted_precond_) shifted_precond_ = make_preconditioner(shifted);
  }
  PhaseTimer timer(stats_.timers.solve);
  CsrOperator op(shifted);
  PcgResult res = pcg_solve(op, *shifted_precond_, rhs, Vec(), solver_.rel_tol,
                            solver_.max_iter);
  if (!res.converged)
    throw NumericalError("shifted-system solve failed to converge");
  ++stats_.newton_linear_solves;
  stats_.newton_pcg_iterations += res.iterations;
  delta = std::move(res.x);
}

}  // namespace eqs
