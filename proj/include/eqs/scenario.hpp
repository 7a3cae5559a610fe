#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqs/excitation.hpp"
#include "eqs/fem_system.hpp"
#include "eqs/integrators.hpp"
#include "eqs/materials.hpp"
#include "eqs/mesh.hpp"
#include "eqs/metrics.hpp"

namespace eqs {

enum class IntegratorKind { Euler, Rkc, Sdirk32 };

struct BoxSpec {
  int nx = 1, ny = 1, nz = 1;
  double lx = 1, ly = 1, lz = 1;
  LayerSpec layers;
};

struct OutputSpec {
  std::string metrics_csv = "metrics.csv";
  std::string probe_csv = "probe.csv";
  std::string solves_csv;
  std::string vtk_prefix;
  int vtk_every = 0;
};

/// A complete scenario description; the JSON schema mirrors the fields
/// (see README). Every acceptance scenario is a committed config file.
struct SimConfig {
  std::string name = "scenario";
  std::optional<std::string> mesh_file;
  std::optional<BoxSpec> box;
  int order = 1;
  MaterialTable materials;
  std::map<std::string, Waveform> excitations;

  IntegratorKind integrator = IntegratorKind::Rkc;
  double tolerance = 1e-2;  // local time-integration error (relative part)
  double atol = -1;         // < 0: derived as 1e-6 x max excitation amplitude
  double t_end = 0.02;
  double dt0 = 1e-5;
  int max_stages = 200;

  LinearSolverParams solver;
  EstimatorParams estimator;
  std::vector<std::array<double, 3>> probes;
  OutputSpec output;
  int workers = 1;

  std::string physics_signature;  // mesh+order+materials+excitations, for compare()

  static SimConfig from_json_file(const std::string& path);
  static SimConfig from_json_text(const std::string& text);

  double effective_atol() const;
};

const char* integrator_kind_name(IntegratorKind k);

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 config error, 2 solver failure
  std::string error;
  std::string name;
  IntegratorKind integrator = IntegratorKind::Rkc;
  EstimatorMode estimator_mode = EstimatorMode::Zero;
  RunTotals totals;
  std::vector<StepMetrics> steps;
  std::vector<SolveRecord> solves;
  std::vector<std::pair<double, std::vector<double>>> probe_rows;
  Vec final_x_free;
  double final_t = 0;

  double per_step_setup_time() const;
};

/// Run one scenario to t_end; writes metrics/probe/solves CSVs and VTK
/// snapshots into out_dir per the config's output block (empty paths skip
/// the file). Never throws: failures are reported via exit_code and error,
/// with partial outputs flushed.
RunResult run_scenario(const SimConfig& config, const std::string& out_dir);

/// Run several scenarios sharing mesh and physics (enforced) and tabulate
/// work and phase-time counters side by side. Writes compare.csv and
/// compare.txt into out_dir and returns the text table.
std::string compare_scenarios(const std::vector<SimConfig>& configs,
                              const std::string& out_dir,
                              std::vector<RunResult>* results_out = nullptr);

}  // namespace eqs
