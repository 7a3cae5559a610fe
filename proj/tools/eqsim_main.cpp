#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eqs/errors.hpp"
#include "eqs/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"eqsim - transient electro-quasistatic field solver"};
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir;
  int workers = 0;
  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  run_cmd->add_option("config", run_config, "scenario config (JSON)")->required();
  run_cmd->add_option("--workers", workers, "element-kernel worker threads");
  run_cmd->add_option("--out", out_dir, "output directory");

  std::vector<std::string> compare_configs;
  auto* compare_cmd = app.add_subcommand("compare", "run scenarios sharing physics and tabulate");
  compare_cmd->add_option("configs", compare_configs, "scenario configs (JSON)")
      ->required()
      ->expected(-1);
  compare_cmd->add_option("--workers", workers, "element-kernel worker threads");
  compare_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      eqs::SimConfig config = eqs::SimConfig::from_json_file(run_config);
      if (workers > 0) config.workers = workers;
      const eqs::RunResult res = eqs::run_scenario(config, out_dir);
      if (res.exit_code != 0) {
        std::cerr << "error: " << res.error << "\n";
        return res.exit_code;
      }
      std::cout << "t_end reached: t = " << res.final_t << "\n"
                << "accepted/rejected steps: " << res.totals.accepted << "/"
                << res.totals.rejected << "\n"
                << "mass solves: " << res.totals.stats.m_solves
                << ", PCG iterations: " << res.totals.stats.pcg_iterations << "\n"
                << "preconditioner setups: " << res.totals.stats.precond_setups
                << ", assemblies: " << res.totals.stats.assemblies << "\n"
                << "wall time: " << res.totals.wall_time << " s\n";
      return 0;
    }

    std::vector<eqs::SimConfig> configs;
    for (const auto& path : compare_configs) {
      configs.push_back(eqs::SimConfig::from_json_file(path));
      if (workers > 0) configs.back().workers = workers;
    }
    std::cout << eqs::compare_scenarios(configs, out_dir);
    return 0;
  } catch (const eqs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
