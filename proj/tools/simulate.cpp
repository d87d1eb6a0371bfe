// SPDX-License-Identifier: Apache-2.0
//
// Scenario runner: synthesizes the light fields, solves the ground
// eigenstate, propagates the excited wave packets, and reduces coherence
// traces, writing CSV outputs plus a manifest. Exit codes: 0 success,
// 2 validation failure, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "wpdyn/wpdyn.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wave-packet excitation simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = hw == 0 ? 2 : static_cast<int>(hw);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config output_dir)");
    cmd->add_option("--seed", seed_override, "master seed (overrides config master_seed)")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--workers", workers, "worker threads for ensemble propagation");
  };

  CLI::App* c_field = app.add_subcommand("field", "synthesize fields and spectra");
  CLI::App* c_eigen = app.add_subcommand("eigenstate", "solve and export the ground eigenstate");
  CLI::App* c_prop = app.add_subcommand("propagate", "export spatio-temporal densities");
  CLI::App* c_coh = app.add_subcommand("coherence", "per-realization and ensemble coherence");
  CLI::App* c_all = app.add_subcommand("all", "run every stage");
  CLI::App* c_val = app.add_subcommand("validate", "check a config and report diagnostics");
  for (CLI::App* cmd : {c_field, c_eigen, c_prop, c_coh, c_all, c_val}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> diags;
    wpdyn::ScenarioConfig cfg = wpdyn::load_scenario_config(config_path, diags);
    if (seed_set) cfg.master_seed = seed_override;
    for (const std::string& d : wpdyn::validate(cfg)) diags.push_back(d);

    if (app.got_subcommand(c_val)) {
      for (const std::string& d : diags) std::cout << d << "\n";
      if (diags.empty()) {
        std::cout << "ok\n";
        return 0;
      }
      return 2;
    }

    if (!diags.empty()) {
      for (const std::string& d : diags) std::cerr << "error: " << d << "\n";
      return 2;
    }
    if (out_dir.empty()) out_dir = cfg.output_dir;
    if (out_dir.empty()) {
      std::cerr << "error: no output directory (set --out or config output_dir)\n";
      return 2;
    }
    if (workers < 1) {
      std::cerr << "error: --workers must be >= 1\n";
      return 2;
    }

    wpdyn::Stage stage = wpdyn::Stage::all;
    if (app.got_subcommand(c_field)) stage = wpdyn::Stage::field;
    if (app.got_subcommand(c_eigen)) stage = wpdyn::Stage::eigenstate;
    if (app.got_subcommand(c_prop)) stage = wpdyn::Stage::propagate;
    if (app.got_subcommand(c_coh)) stage = wpdyn::Stage::coherence;

    wpdyn::run_scenario(cfg, stage, out_dir, workers);
    return 0;
  } catch (const wpdyn::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wpdyn::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
