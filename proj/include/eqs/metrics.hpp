#pragma once

#include <string>
#include <vector>

#include "eqs/ode_system.hpp"

namespace eqs {

/// One row per attempted time step. Column order of the CSV is fixed:
/// step,t,dt,method,accepted,stages,newton_iters,m_solves,pcg_iters,rho,
/// estimator_mode,estimator_rank,err_est,
/// time_residual_s,time_solve_s,time_setup_s,time_estimator_s
struct StepMetrics {
  long step = 0;
  double t = 0;   // step start time
  double dt = 0;
  std::string method;
  bool accepted = false;
  int stages = 0;
  int newton_iters = 0;
  long m_solves = 0;    // mass solves attributable to this attempt
  long pcg_iters = 0;   // their iterations
  double rho = 0;
  std::string estimator_mode;
  int estimator_rank = 0;
  double err_est = 0;
  PhaseTimers timers;   // per-attempt deltas
};

/// Totals accumulated over a run; equal to the column sums of the step rows
/// plus the setup work done before stepping starts.
struct RunTotals {
  long accepted = 0;
  long rejected = 0;
  long stages = 0;
  long newton_iterations = 0;
  SolveStats stats;
  double wall_time = 0;
};

void write_metrics_csv(const std::string& path, const std::vector<StepMetrics>& rows);
void write_solves_csv(const std::string& path, const std::vector<SolveRecord>& rows);
void write_probe_csv(const std::string& path, const std::vector<std::string>& probe_names,
                     const std::vector<std::pair<double, std::vector<double>>>& rows);

}  // namespace eqs
