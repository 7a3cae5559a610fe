#include "eqs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqs/dofmap.hpp"
#include "eqs/errors.hpp"
#include "eqs/msh_io.hpp"
#include "eqs/probes.hpp"
#include "eqs/vtk_writer.hpp"
#include "json.hpp"

namespace eqs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Waveform waveform_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sinusoid")
    return SinusoidWaveform{j.at("amplitude").get<double>(), j.at("frequency").get<double>(),
                            j.value("phase", 0.0)};
  if (kind == "ramp")
    return RampWaveform{j.at("amplitude").get<double>(), j.at("rise_time").get<double>()};
  if (kind == "constant") return ConstantWaveform{j.at("value").get<double>()};
  throw ConfigError("unknown waveform kind '" + kind + "'");
}

MaterialModel material_from_json(const json& j) {
  MaterialModel m;
  m.eps_r = j.at("eps_r").get<double>();
  const json& c = j.at("conductivity");
  const std::string kind = c.at("kind").get<std::string>();
  if (kind == "constant") {
    m.conductivity = ConstantConductivity{c.at("kappa").get<double>()};
  } else if (kind == "microvaristor") {
    m.conductivity = MicrovaristorConductivity{
        c.value("kappa_lo", 1e-10), c.value("kappa_hi", 1e-4), c.value("e_switch", 5e5),
        c.value("width", 5e4)};
  } else {
    throw ConfigError("unknown conductivity kind '" + kind + "'");
  }
  m.validate();
  return m;
}

EstimatorParams estimator_from_json(const json& j) {
  EstimatorParams p;
  const std::string mode = j.value("mode", "zero");
  if (mode == "zero") p.mode = EstimatorMode::Zero;
  else if (mode == "previous") p.mode = EstimatorMode::Previous;
  else if (mode == "spe") p.mode = EstimatorMode::Spe;
  else if (mode == "pod_fixed") p.mode = EstimatorMode::PodFixed;
  else if (mode == "pod_rolling") p.mode = EstimatorMode::PodRolling;
  else throw ConfigError("unknown estimator mode '" + mode + "'");
  p.spe_window = j.value("window", p.spe_window);
  p.pod_snapshots = j.value("snapshots", p.pod_snapshots);
  p.pod_rank = j.value("rank", p.pod_rank);
  p.pod_capacity = j.value("capacity", p.pod_capacity);
  p.pod_threshold = j.value("threshold", p.pod_threshold);
  p.mgs_drop_tol = j.value("mgs_drop_tol", p.mgs_drop_tol);
  if (p.spe_window < 1 || p.pod_snapshots < 1 || p.pod_rank < 1 || p.pod_capacity < 1)
    throw ConfigError("estimator window/snapshot/rank/capacity values must be >= 1");
  return p;
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (file.empty()) return {};
  if (dir.empty() || fs::path(file).is_absolute()) return file;
  return (fs::path(dir) / file).string();
}

}  // namespace

const char* integrator_kind_name(IntegratorKind k) {
  switch (k) {
    case IntegratorKind::Euler: return "euler";
    case IntegratorKind::Rkc: return "rkc";
    case IntegratorKind::Sdirk32: return "sdirk32";
  }
  return "?";
}

double SimConfig::effective_atol() const {
  if (atol > 0) return atol;
  double amp = 0.0;
  for (const auto& [name, w] : excitations) {
    if (const auto* s = std::get_if<SinusoidWaveform>(&w)) amp = std::max(amp, std::abs(s->amplitude));
    if (const auto* r = std::get_if<RampWaveform>(&w)) amp = std::max(amp, std::abs(r->amplitude));
    if (const auto* c = std::get_if<ConstantWaveform>(&w)) amp = std::max(amp, std::abs(c->value));
  }
  return std::max(1e-6 * amp, 1e-12);
}

SimConfig SimConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return from_json_text(buf.str());
}

SimConfig SimConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    SimConfig c;
    c.name = j.value("name", c.name);

    const json& mesh = j.at("mesh");
    if (mesh.contains("file")) {
      c.mesh_file = mesh.at("file").get<std::string>();
    } else if (mesh.contains("box")) {
      const json& b = mesh.at("box");
      BoxSpec box;
      box.nx = b.at("nx").get<int>();
      box.ny = b.at("ny").get<int>();
      box.nz = b.at("nz").get<int>();
      box.lx = b.at("lx").get<double>();
      box.ly = b.at("ly").get<double>();
      box.lz = b.at("lz").get<double>();
      box.layers.z_planes = b.value("z_planes", std::vector<double>{});
      box.layers.regions = b.value("regions", std::vector<int>{1});
      c.box = box;
    } else {
      throw ConfigError("mesh: need either \"file\" or \"box\"");
    }

    c.order = j.value("order", 1);
    for (const auto& [key, jm] : j.at("materials").items()) {
      int region = 0;
      try {
        region = std::stoi(key);
      } catch (const std::exception&) {
        throw ConfigError("material key must be a region id, got '" + key + "'");
      }
      c.materials[region] = material_from_json(jm);
    }
    for (const auto& [key, jw] : j.at("excitations").items())
      c.excitations[key] = waveform_from_json(jw);

    if (j.contains("integrator")) {
      const json& ji = j.at("integrator");
      const std::string kind = ji.value("kind", "rkc");
      if (kind == "euler") c.integrator = IntegratorKind::Euler;
      else if (kind == "rkc") c.integrator = IntegratorKind::Rkc;
      else if (kind == "sdirk32") c.integrator = IntegratorKind::Sdirk32;
      else throw ConfigError("unknown integrator kind '" + kind + "'");
      c.tolerance = ji.value("tolerance", c.tolerance);
      c.atol = ji.value("atol", c.atol);
      c.t_end = ji.value("t_end", c.t_end);
      c.dt0 = ji.value("dt0", c.dt0);
      c.max_stages = ji.value("max_stages", c.max_stages);
    }
    if (!(c.tolerance > 0)) throw ConfigError("integrator tolerance must be positive");
    if (!(c.t_end > 0) || !(c.dt0 > 0)) throw ConfigError("t_end and dt0 must be positive");

    if (j.contains("solver")) {
      const json& js = j.at("solver");
      const std::string p = js.value("preconditioner", "amg");
      if (p == "jacobi") c.solver.precond = PrecondKind::Jacobi;
      else if (p == "ssor") c.solver.precond = PrecondKind::Ssor;
      else if (p == "amg") c.solver.precond = PrecondKind::Amg;
      else throw ConfigError("unknown preconditioner '" + p + "'");
      c.solver.rel_tol = js.value("rel_tol", c.solver.rel_tol);
      c.solver.max_iter = js.value("max_iter", c.solver.max_iter);
      c.solver.amg.strength_threshold =
          js.value("amg_strength_threshold", c.solver.amg.strength_threshold);
      c.solver.amg.coarse_limit = js.value("amg_coarse_limit", c.solver.amg.coarse_limit);
      if (!(c.solver.rel_tol > 0)) throw ConfigError("solver rel_tol must be positive");
    }
    if (j.contains("estimator")) c.estimator = estimator_from_json(j.at("estimator"));

    for (const auto& jp : j.value("probes", json::array())) {
      if (!jp.is_array() || jp.size() != 3) throw ConfigError("probe must be [x, y, z]");
      c.probes.push_back({jp[0].get<double>(), jp[1].get<double>(), jp[2].get<double>()});
    }

    if (j.contains("output")) {
      const json& jo = j.at("output");
      c.output.metrics_csv = jo.value("metrics_csv", c.output.metrics_csv);
      c.output.probe_csv = jo.value("probe_csv", c.output.probe_csv);
      c.output.solves_csv = jo.value("solves_csv", c.output.solves_csv);
      c.output.vtk_prefix = jo.value("vtk_prefix", c.output.vtk_prefix);
      c.output.vtk_every = jo.value("vtk_every", c.output.vtk_every);
    }
    c.workers = j.value("workers", 1);
    if (c.workers < 1) throw ConfigError("workers must be >= 1");

    json sig;
    sig["mesh"] = j.at("mesh");
    sig["order"] = c.order;
    sig["materials"] = j.at("materials");
    sig["excitations"] = j.at("excitations");
    c.physics_signature = sig.dump();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

double RunResult::per_step_setup_time() const {
  return totals.stats.timers.setup / static_cast<double>(std::max(1L, totals.accepted));
}

RunResult run_scenario(const SimConfig& config, const std::string& out_dir) {
  RunResult res;
  res.name = config.name;
  res.integrator = config.integrator;
  res.estimator_mode = config.estimator.mode;
  const auto wall0 = std::chrono::steady_clock::now();

  std::vector<std::string> probe_names;
  for (size_t p = 0; p < config.probes.size(); ++p) probe_names.push_back("p" + std::to_string(p));

  try {
    if (!out_dir.empty()) fs::create_directories(out_dir);
    TetMesh mesh;
    if (config.mesh_file) mesh = load_msh(*config.mesh_file);
    else if (config.box)
      mesh = generate_box_mesh(config.box->nx, config.box->ny, config.box->nz, config.box->lx,
                               config.box->ly, config.box->lz, config.box->layers);
    else throw ConfigError("no mesh source in config");

    for (int t = 0; t < mesh.n_tets(); ++t)
      if (!config.materials.count(mesh.region_id[t]))
        throw ConfigError("no material for mesh region " + std::to_string(mesh.region_id[t]));

    std::vector<std::string> dirichlet;
    for (const auto& [set, w] : config.excitations) dirichlet.push_back(set);
    const DofMap dm = build_dof_map(mesh, config.order, dirichlet);
    const BoundaryExcitation exc{config.excitations};

    std::vector<PointLocation> probe_locs;
    for (const auto& p : config.probes) {
      auto loc = locate_point(mesh, p);
      if (!loc) throw ConfigError("probe point outside the mesh");
      probe_locs.push_back(*loc);
    }

    FemSystem system(mesh, dm, config.materials, exc, config.solver, config.estimator,
                     config.workers);

    IntegratorState state;
    state.t = 0;
    state.x = Vec::Zero(dm.n_free());
    state.dt = config.dt0;

    RkcOptions rkc_opts;
    rkc_opts.control = {config.tolerance, config.effective_atol()};
    rkc_opts.max_stages = config.max_stages;
    SdirkOptions sdirk_opts;
    sdirk_opts.control = rkc_opts.control;

    const auto record_probes = [&]() {
      if (config.probes.empty()) return;
      const Vec full = system.lift_full(state.t, state.x);
      std::vector<double> vals;
      for (const auto& loc : probe_locs) vals.push_back(interpolate(dm, full, loc));
      res.probe_rows.emplace_back(state.t, std::move(vals));
    };
    record_probes();

    long step_index = 0;
    long vtk_index = 0;
    int consecutive_rejections = 0;
    const double t_final = config.t_end * (1.0 - 1e-12);

    while (state.t < t_final) {
      if (step_index > 500000) throw NumericalError("step limit exceeded");

      const SolveStats before = system.stats();
      StepAttempt att;
      switch (config.integrator) {
        case IntegratorKind::Euler: {
          const double rho = spectral_radius_cached(state, system);
          const double dt_stab = rho > 0 ? 1.8 / rho : config.dt0;
          const double dt = std::min({config.dt0, dt_stab, config.t_end - state.t});
          att = euler_step(state, system, dt);
          att.rho = rho;
          ++state.rho.age;
          break;
        }
        case IntegratorKind::Rkc:
          state.dt = std::min(state.dt, config.t_end - state.t);
          att = rkc_step(state, system, rkc_opts);
          break;
        case IntegratorKind::Sdirk32:
          state.dt = std::min(state.dt, config.t_end - state.t);
          att = sdirk_step(state, system, sdirk_opts);
          break;
      }
      const SolveStats& after = system.stats();

      StepMetrics row;
      row.step = step_index++;
      row.t = att.t_start;
      row.dt = att.dt;
      row.method = integrator_kind_name(config.integrator);
      row.accepted = att.accepted;
      row.stages = att.stages;
      row.newton_iters = att.newton_iterations;
      row.m_solves = after.m_solves - before.m_solves;
      row.pcg_iters = after.pcg_iterations - before.pcg_iterations;
      row.rho = att.rho;
      row.estimator_mode = estimator_mode_name(config.estimator.mode);
      row.estimator_rank = system.estimator().current_rank();
      row.err_est = att.error;
      row.timers.residual = after.timers.residual - before.timers.residual;
      row.timers.solve = after.timers.solve - before.timers.solve;
      row.timers.setup = after.timers.setup - before.timers.setup;
      row.timers.estimator = after.timers.estimator - before.timers.estimator;
      res.steps.push_back(row);

      if (att.accepted) {
        consecutive_rejections = 0;
        record_probes();
        if (config.output.vtk_every > 0 && !config.output.vtk_prefix.empty() &&
            state.stats.accepted % config.output.vtk_every == 0) {
          char name[64];
          std::snprintf(name, sizeof name, "%s_%06ld.vtk", config.output.vtk_prefix.c_str(),
                        vtk_index++);
          write_vtk(join_path(out_dir, name), mesh, dm, config.materials,
                    system.lift_full(state.t, state.x));
        }
      } else {
        if (++consecutive_rejections > 40)
          throw NumericalError("no accepted step after 40 attempts");
      }
      if (!(state.dt > 0) || !std::isfinite(state.dt))
        throw NumericalError("step size collapsed");
    }

    res.final_x_free = state.x;
    res.final_t = state.t;
    res.totals.accepted = state.stats.accepted;
    res.totals.rejected = state.stats.rejected;
    res.totals.stages = state.stats.stages;
    res.totals.newton_iterations = state.stats.newton_iterations;
    res.totals.stats = system.stats();
    res.solves = system.solve_records();
  } catch (const ConfigError& e) {
    res.exit_code = 1;
    res.error = e.what();
  } catch (const ParseError& e) {  // unreadable mesh file is a config-class failure
    res.exit_code = 1;
    res.error = e.what();
  } catch (const GeometryError& e) {
    res.exit_code = 1;
    res.error = e.what();
  } catch (const std::invalid_argument& e) {
    res.exit_code = 1;
    res.error = e.what();
  } catch (const std::exception& e) {
    res.exit_code = 2;
    res.error = e.what();
  }

  res.totals.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  if (res.exit_code != 1 && !out_dir.empty()) fs::create_directories(out_dir);
  if (res.exit_code != 1) {
    if (!config.output.metrics_csv.empty())
      write_metrics_csv(join_path(out_dir, config.output.metrics_csv), res.steps);
    if (!config.output.probe_csv.empty())
      write_probe_csv(join_path(out_dir, config.output.probe_csv), probe_names, res.probe_rows);
    if (!config.output.solves_csv.empty())
      write_solves_csv(join_path(out_dir, config.output.solves_csv), res.solves);
  }
  return res;
}

std::string compare_scenarios(const std::vector<SimConfig>& configs, const std::string& out_dir,
                              std::vector<RunResult>* results_out) {
  if (configs.empty()) throw std::invalid_argument("compare: no configs");
  for (const auto& c : configs)
    if (c.physics_signature != configs.front().physics_signature)
      throw std::invalid_argument("compare: configs do not share mesh and physics (" +
                                  c.name + ")");

  std::vector<RunResult> results;
  for (SimConfig c : configs) {
    c.output.metrics_csv = c.name + "_metrics.csv";
    c.output.probe_csv = c.probes.empty() ? "" : c.name + "_probe.csv";
    c.output.solves_csv = c.name + "_solves.csv";
    results.push_back(run_scenario(c, out_dir));
    if (results.back().exit_code != 0)
      throw NumericalError("compare: scenario '" + c.name + "' failed: " +
                           results.back().error);
  }

  std::ostringstream txt;
  std::ostringstream csv;
  csv << "name,integrator,estimator,accepted,rejected,stages,newton_iters,m_solves,"
         "pcg_iters,rho_solves,newton_pcg_iters,precond_setups,assemblies,svd_count,"
         "wall_s,time_residual_s,time_solve_s,time_setup_s,time_estimator_s,"
         "setup_per_step_s\n";
  char buf[512];
  txt << "scenario                     integ    estimator    steps  rej   m_solves  pcg_iters"
         "  setups  assemblies  svd  resid/step[s]  setup/step[s]\n";
  for (const auto& r : results) {
    const auto& s = r.totals.stats;
    std::snprintf(buf, sizeof buf,
                  "%s,%s,%s,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                  r.name.c_str(), integrator_kind_name(r.integrator),
                  estimator_mode_name(r.estimator_mode), r.totals.accepted, r.totals.rejected,
                  r.totals.stages, r.totals.newton_iterations, s.m_solves, s.pcg_iterations,
                  s.rho_solves, s.newton_pcg_iterations, s.precond_setups, s.assemblies,
                  s.svd_count, r.totals.wall_time, s.timers.residual, s.timers.solve,
                  s.timers.setup, s.timers.estimator, r.per_step_setup_time());
    csv << buf;
    const double resid_per_step =
        s.timers.residual / static_cast<double>(std::max(1L, r.totals.accepted));
    std::snprintf(buf, sizeof buf,
                  "%-28s %-8s %-12s %-6ld %-5ld %-9ld %-10ld %-7ld %-11ld %-4ld %-14.3e %.3e\n",
                  r.name.c_str(), integrator_kind_name(r.integrator),
                  estimator_mode_name(r.estimator_mode), r.totals.accepted, r.totals.rejected,
                  s.m_solves, s.pcg_iterations, s.precond_setups, s.assemblies, s.svd_count,
                  resid_per_step, r.per_step_setup_time());
    txt << buf;
  }

  // derived observations the experiments are after
  const RunResult* rkc = nullptr;
  const RunResult* sdirk = nullptr;
  const RunResult* pod_fixed = nullptr;
  const RunResult* pod_rolling = nullptr;
  for (const auto& r : results) {
    if (r.integrator == IntegratorKind::Rkc && !rkc) rkc = &r;
    if (r.integrator == IntegratorKind::Sdirk32 && !sdirk) sdirk = &r;
    if (r.estimator_mode == EstimatorMode::PodFixed) pod_fixed = &r;
    if (r.estimator_mode == EstimatorMode::PodRolling) pod_rolling = &r;
  }
  if (rkc && sdirk) {
    const double ratio = sdirk->per_step_setup_time() /
                         std::max(rkc->per_step_setup_time(), 1e-300);
    std::snprintf(buf, sizeof buf,
                  "\nper-step system-setup time ratio sdirk32/rkc = %.3g\n"
                  "preconditioner setups: rkc = %ld, sdirk32 = %ld\n",
                  ratio, rkc->totals.stats.precond_setups, sdirk->totals.stats.precond_setups);
    txt << buf;
  }
  if (pod_fixed && pod_rolling) {
    const long fixed_iters = pod_fixed->totals.stats.pcg_iterations;
    const long rolling_iters = pod_rolling->totals.stats.pcg_iterations;
    std::snprintf(buf, sizeof buf,
                  "\ntime-stepping PCG iterations: pod_rolling = %ld, pod_fixed = %ld -> %s\n",
                  rolling_iters, fixed_iters,
                  rolling_iters < fixed_iters ? "expected ordering (rolling < fixed)"
                                              : "ORDERING INVERTED on this model");
    txt << buf;
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(join_path(out_dir, "compare.csv")) << csv.str();
    std::ofstream(join_path(out_dir, "compare.txt")) << txt.str();
  }
  if (results_out) *results_out = std::move(results);
  return txt.str();
}

}  // namespace eqs
