#include "eqs/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "eqs/errors.hpp"

namespace eqs {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<StepMetrics>& rows) {
  auto os = open_out(path);
  os << "step,t,dt,method,accepted,stages,newton_iters,m_solves,pcg_iters,rho,"
        "estimator_mode,estimator_rank,err_est,"
        "time_residual_s,time_solve_s,time_setup_s,time_estimator_s\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%ld,%.17g,%.17g,%s,%d,%d,%d,%ld,%ld,%.17g,%s,%d,%.17g,%.6g,%.6g,%.6g,%.6g\n",
                  r.step, r.t, r.dt, r.method.c_str(), r.accepted ? 1 : 0, r.stages,
                  r.newton_iters, r.m_solves, r.pcg_iters, r.rho, r.estimator_mode.c_str(),
                  r.estimator_rank, r.err_est, r.timers.residual, r.timers.solve,
                  r.timers.setup, r.timers.estimator);
    os << buf;
  }
}

void write_solves_csv(const std::string& path, const std::vector<SolveRecord>& rows) {
  auto os = open_out(path);
  os << "solve,t,estimator_mode,estimator_rank,iterations,initial_rel_residual\n";
  char buf[256];
  long i = 0;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%s,%d,%d,%.17g\n", i++, r.t,
                  r.estimator_mode.c_str(), r.estimator_rank, r.iterations,
                  r.initial_rel_residual);
    os << buf;
  }
}

void write_probe_csv(const std::string& path, const std::vector<std::string>& probe_names,
                     const std::vector<std::pair<double, std::vector<double>>>& rows) {
  auto os = open_out(path);
  os << "t";
  for (const auto& n : probe_names) os << "," << n;
  os << "\n";
  char buf[64];
  for (const auto& [t, values] : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << buf;
    for (double v : values) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace eqs
