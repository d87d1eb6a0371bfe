// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wpdyn/config.hpp"
#include "wpdyn/csv.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/seeding.hpp"

namespace wpdyn {

enum class Stage { field, eigenstate, propagate, coherence, all };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::field: return "field";
    case Stage::eigenstate: return "eigenstate";
    case Stage::propagate: return "propagate";
    case Stage::coherence: return "coherence";
    case Stage::all: return "all";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(const std::string& s) {
  if (s == "field") return Stage::field;
  if (s == "eigenstate") return Stage::eigenstate;
  if (s == "propagate") return Stage::propagate;
  if (s == "coherence") return Stage::coherence;
  if (s == "all") return Stage::all;
  return std::nullopt;
}

namespace detail {

inline std::string realization_tag(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "r%03d", k);
  return buf;
}

/// Run tasks on a small pool. Results must be written to pre-assigned slots
/// so the output is independent of scheduling order.
inline void run_parallel(std::vector<std::function<void()>>& tasks, int workers) {
  const std::size_t n = tasks.size();
  if (n == 0) return;
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nw == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Execute one scenario stage. All outputs land under out_dir; reruns with an
/// identical config and seed produce byte-identical files regardless of the
/// worker count.
inline void run_scenario(const ScenarioConfig& cfg, Stage stage,
                         const std::filesystem::path& out_dir, int workers = 2) {
  {
    std::vector<std::string> diags = validate(cfg);
    if (!diags.empty()) throw validation_error(diags.front());
  }
  std::filesystem::create_directories(out_dir);
  const TimeGrid time = cfg.make_time_grid();
  const RadialGrid grid = cfg.make_radial_grid();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;

  const bool want_field_files = stage == Stage::field || stage == Stage::all;
  const bool want_eigen_files = stage == Stage::eigenstate || stage == Stage::all;
  const bool want_density = stage == Stage::propagate || stage == Stage::all;
  const bool want_traces = stage == Stage::coherence || stage == Stage::all;
  const bool need_fields = stage != Stage::eigenstate;
  const bool need_eigen = stage != Stage::field;
  const bool need_runs = want_density || want_traces;

  // Light fields: one coherent pulse plus one normalized incoherent
  // realization per ensemble member, all on the propagation grid.
  LightField coherent = synthesize(cfg.coherent_field_spec(), time, 0);
  std::vector<LightField> incoherent;
  if (need_fields) {
    const double flux_ref = coherent.flux();
    incoherent.reserve(static_cast<std::size_t>(cfg.realizations));
    for (int k = 0; k < cfg.realizations; ++k) {
      const std::uint64_t seed = derive_stream_seed(
          SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)});
      incoherent.push_back(normalize_flux(synthesize(cfg.incoherent_field_spec(), time, seed),
                                          flux_ref));
    }
  }

  if (want_field_files) {
    write_field_csv(out_dir / "field_coherent.csv", coherent);
    outputs.push_back("field_coherent.csv");
    SpectralDensity coh_spec = spectrum(coherent);
    write_spectrum_csv(out_dir / "spectrum_coherent.csv", coh_spec);
    outputs.push_back("spectrum_coherent.csv");
    std::vector<SpectralDensity> spectra;
    spectra.reserve(incoherent.size());
    for (int k = 0; k < cfg.realizations; ++k) {
      const std::string tag = detail::realization_tag(k);
      write_field_csv(out_dir / ("field_incoherent_" + tag + ".csv"),
                      incoherent[static_cast<std::size_t>(k)]);
      outputs.push_back("field_incoherent_" + tag + ".csv");
      write_jumps_csv(out_dir / ("jumps_" + tag + ".csv"),
                      incoherent[static_cast<std::size_t>(k)]);
      outputs.push_back("jumps_" + tag + ".csv");
      spectra.push_back(spectrum(incoherent[static_cast<std::size_t>(k)]));
    }
    write_spectrum_csv(out_dir / "spectrum_incoherent_r000.csv", spectra.front());
    outputs.push_back("spectrum_incoherent_r000.csv");
    write_spectrum_csv(out_dir / "spectrum_incoherent_mean.csv", average_spectra(spectra));
    outputs.push_back("spectrum_incoherent_mean.csv");
  }

  // Ground eigenstate on the propagation grid, shared by every run.
  EigenState ground;
  if (need_eigen) {
    BoundStatesResult solved = bound_states(cfg.ground_channel, grid, cfg.vibrational_level + 1);
    if (!solved.diagnostic.empty()) {
      throw validation_error("ground_channel: " + solved.diagnostic);
    }
    ground = solved.states.back();
  }
  if (want_eigen_files) {
    write_pes_csv(out_dir / "pes_ground.csv", cfg.ground_channel, grid);
    outputs.push_back("pes_ground.csv");
    write_pes_csv(out_dir / "pes_excited_1.csv", cfg.excited_channel_1, grid);
    outputs.push_back("pes_excited_1.csv");
    write_pes_csv(out_dir / "pes_excited_2.csv", cfg.excited_channel_2, grid);
    outputs.push_back("pes_excited_2.csv");
    write_eigenstate_csv(out_dir / "eigenstate_ground.csv", ground);
    outputs.push_back("eigenstate_ground.csv");
  }

  if (need_runs) {
    auto make_run = [&](const ChannelSpec& channel) {
      PropagationRun run;
      run.channel = channel;
      run.dipole = cfg.dipole;
      run.source = ground;
      run.grid = grid;
      run.time = time;
      run.snapshot_stride = cfg.snapshot_stride;
      run.absorber = cfg.absorber;
      return run;
    };
    const PropagationRun run1 = make_run(cfg.excited_channel_1);
    const PropagationRun run2 = make_run(cfg.excited_channel_2);

    PairOptions plain;
    plain.trace_stride = cfg.snapshot_stride;
    PairOptions with_density = plain;
    with_density.density = cfg.density;

    // Slot 0: coherent pulse. Slots 1..N: incoherent realizations (only
    // realization 0 when traces are not requested).
    const int n_realization_tasks = want_traces ? cfg.realizations : 1;
    std::vector<PairResult> results(static_cast<std::size_t>(n_realization_tasks) + 1);
    std::vector<std::function<void()>> tasks;
    tasks.emplace_back([&] {
      results[0] = propagate_coherence_pair(run1, run2, coherent,
                                            want_density ? with_density : plain);
    });
    for (int k = 0; k < n_realization_tasks; ++k) {
      tasks.emplace_back([&, k] {
        const LightField& f = incoherent[static_cast<std::size_t>(k)];
        const PairOptions& opt = (want_density && k == 0) ? with_density : plain;
        results[static_cast<std::size_t>(k) + 1] = propagate_coherence_pair(run1, run2, f, opt);
      });
    }
    detail::run_parallel(tasks, workers);

    if (!results[0].weak_field_ok) {
      warnings.push_back("coherent run leaves the weak-field regime; results may not be "
                         "perturbative");
    }
    for (int k = 0; k < n_realization_tasks; ++k) {
      if (!results[static_cast<std::size_t>(k) + 1].weak_field_ok) {
        warnings.push_back("incoherent realization " + std::to_string(k) +
                           " leaves the weak-field regime");
      }
    }

    if (want_density) {
      write_density_csv(out_dir / "density_coherent_ch1.csv", *results[0].density1);
      outputs.push_back("density_coherent_ch1.csv");
      write_density_csv(out_dir / "density_coherent_ch2.csv", *results[0].density2);
      outputs.push_back("density_coherent_ch2.csv");
      write_density_csv(out_dir / "density_incoherent_r000_ch1.csv", *results[1].density1);
      outputs.push_back("density_incoherent_r000_ch1.csv");
      write_density_csv(out_dir / "density_incoherent_r000_ch2.csv", *results[1].density2);
      outputs.push_back("density_incoherent_r000_ch2.csv");
    }

    if (want_traces) {
      write_trace_csv(out_dir / "coherence_coherent.csv", results[0].trace);
      outputs.push_back("coherence_coherent.csv");
      std::vector<CoherenceTrace> traces;
      traces.reserve(static_cast<std::size_t>(cfg.realizations));
      for (int k = 0; k < cfg.realizations; ++k) {
        const std::string tag = detail::realization_tag(k);
        write_trace_csv(out_dir / ("coherence_incoherent_" + tag + ".csv"),
                        results[static_cast<std::size_t>(k) + 1].trace);
        outputs.push_back("coherence_incoherent_" + tag + ".csv");
        traces.push_back(results[static_cast<std::size_t>(k) + 1].trace);
      }
      EnsembleResult ensemble = ensemble_average(std::move(traces));
      write_ensemble_csv(out_dir / "coherence_incoherent_ensemble.csv", ensemble);
      outputs.push_back("coherence_incoherent_ensemble.csv");
    }
  }

  // Manifest last: the resolved config plus every derived seed reproduces the
  // run byte for byte. No timestamps or host details on purpose.
  nlohmann::ordered_json manifest;
  manifest["format"] = "wpdyn-manifest-1";
  manifest["stage"] = stage_name(stage);
  manifest["config"] = config_to_json(cfg);
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < cfg.realizations; ++k) {
    seeds.push_back(derive_stream_seed(SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)}));
  }
  manifest["realization_seeds"] = seeds;
  outputs.push_back("manifest.json");
  manifest["outputs"] = outputs;
  {
    std::ofstream mf(out_dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
  }

  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace wpdyn
