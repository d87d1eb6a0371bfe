// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails. The heavy checks (9, 10) run
// the bundled scenarios at full resolution, so the whole suite takes on the
// order of ten minutes.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stats_util.hpp"
#include "wpdyn/wpdyn.hpp"

using namespace wpdyn;
namespace fs = std::filesystem;

namespace {

struct CheckResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<CheckResult> g_results;

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::printf("%s  %2d  %-26s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

ScenarioConfig load_config(const std::string& name) {
  std::vector<std::string> diags;
  ScenarioConfig cfg = load_scenario_config(std::string(WPDYN_SCENARIO_DIR) + "/" + name, diags);
  if (!diags.empty()) throw validation_error("config " + name + ": " + diags.front());
  return cfg;
}

double morse_level(double w0, double a, double mu, double w_inf, int v) {
  const double we = std::sqrt(2.0 * w0 / mu) / a;
  const double x = static_cast<double>(v) + 0.5;
  return w_inf + we * x - (we * we / (4.0 * w0)) * x * x;
}

// ---------------------------------------------------------------------------
// 1. Delta-pulse replica
void check_delta_replica() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg = load_config("fig3_bottom.json");
  RadialGrid grid = cfg.make_radial_grid();
  EigenState v5 = bound_states(cfg.ground_channel, grid, cfg.vibrational_level + 1).states.back();

  PropagationRun run;
  run.channel = cfg.excited_channel_1;
  run.dipole = cfg.dipole;
  run.source = v5;
  run.grid = grid;
  run.time = TimeGrid::from_fs(0.0, 0.003, 0.003);  // a single step
  run.snapshot_stride = 1;
  const double dt = run.time.dt();
  WavepacketSeries s = propagate_with(
      run, [dt](double t) { return std::abs(t - 0.5 * dt) < 0.5 * dt ? 1.0 : 0.0; });

  std::vector<std::complex<double>> replica(s.snapshots[1].u.size(), 0.0);
  for (int i = 1; i + 1 < grid.n_points(); ++i) {
    replica[static_cast<std::size_t>(i)] =
        eval_dipole(run.dipole, grid.point(i)) * v5.u[static_cast<std::size_t>(i)];
  }
  const double na = trapezoid_norm_sq(grid, s.snapshots[1].u);
  const double nb = trapezoid_norm_sq(grid, replica);
  const double overlap =
      std::norm(trapezoid_overlap(grid, s.snapshots[1].u, replica)) / (na * nb);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "delta-pulse replica", overlap > 0.999 && seconds < 1.0,
         fmt("overlap=%.6f (need >0.999), %.2f s (need <1 s)", overlap, seconds));
}

// ---------------------------------------------------------------------------
// 2. Eigensolver oracles
void check_eigensolver_oracles() {
  ChannelSpec morse{MorsePes{0.1, 5.0, 2.5, 0.0}, 0, 4590.0};
  RadialGrid mgrid(1.0, 12.0, 2201);
  BoundStatesResult mres = bound_states(morse, mgrid, 6);
  double worst_morse = 0.0;
  for (int v = 0; v <= 5; ++v) {
    worst_morse = std::max(worst_morse,
                           std::abs(mres.states[static_cast<std::size_t>(v)].energy -
                                    morse_level(0.1, 2.5, 4590.0, 0.0, v)));
  }

  const double mu = 918.0;
  const double omega = 0.005;
  RadialGrid hgrid(0.4, 7.6, 3601);
  std::vector<double> v(static_cast<std::size_t>(hgrid.n_points()));
  for (int i = 0; i < hgrid.n_points(); ++i) {
    const double x = hgrid.point(i) - 4.0;
    v[static_cast<std::size_t>(i)] = 0.5 * mu * omega * omega * x * x;
  }
  BoundStatesResult hres = bound_states_sampled(hgrid, v, mu, 6);
  double worst_harm = 0.0;
  for (int q = 0; q <= 5; ++q) {
    worst_harm = std::max(worst_harm, std::abs(hres.states[static_cast<std::size_t>(q)].energy -
                                               (q + 0.5) * omega));
  }
  report(2, "eigensolver oracles", worst_morse < 1e-5 && worst_harm < 1e-6,
         fmt("morse err=%.2e (need <1e-5), harmonic err=%.2e (need <1e-6)", worst_morse,
             worst_harm));
}

// ---------------------------------------------------------------------------
// 3. Unitarity over 1e5 steps
void check_unitarity() {
  ScenarioConfig cfg = load_config("fig3_bottom.json");
  RadialGrid grid = cfg.make_radial_grid();
  EigenState v5 = bound_states(cfg.ground_channel, grid, cfg.vibrational_level + 1).states.back();
  std::vector<std::complex<double>> u0(v5.u.begin(), v5.u.end());
  TimeGrid time = TimeGrid::from_fs(0.0, 300.0, 0.003);
  WavepacketSeries s =
      propagate_homogeneous(u0, cfg.ground_channel, grid, time, static_cast<int>(time.n_steps()));

  double norm_drift = 0.0;
  for (double p : s.population) norm_drift = std::max(norm_drift, std::abs(std::sqrt(p) - 1.0));
  const double overlap = std::abs(trapezoid_overlap(grid, u0, s.snapshots.back().u));
  const double overlap_drift = std::abs(overlap - 1.0);
  report(3, "unitarity over 300 fs", norm_drift <= 1e-8 && overlap_drift <= 1e-8,
         fmt("norm drift=%.2e, overlap drift=%.2e (both need <=1e-8, %lld steps)", norm_drift,
             overlap_drift, static_cast<long long>(time.n_steps())));
}

// ---------------------------------------------------------------------------
// 4. Superposition of replicas
void check_superposition() {
  ScenarioConfig cfg = load_config("fig3_bottom.json");
  RadialGrid grid = cfg.make_radial_grid();
  EigenState v5 = bound_states(cfg.ground_channel, grid, cfg.vibrational_level + 1).states.back();

  PropagationRun run;
  run.channel = cfg.excited_channel_1;
  run.dipole = cfg.dipole;
  run.source = v5;
  run.grid = grid;
  run.time = TimeGrid::from_fs(0.0, 2.0, 0.0025);
  run.snapshot_stride = 100;
  const double t_end = run.time.t_end();
  const double f = superposition_sum_check(
      run, [t_end](double t) { return t <= t_end ? 1e-4 : 0.0; }, fs_to_au(0.05));
  report(4, "superposition of replicas", f > 0.99,
         fmt("fidelity=%.6f (need >0.99, 2 fs rectangle, 0.05 fs quadrature)", f));
}

// ---------------------------------------------------------------------------
// 5. Field statistics
void check_field_statistics() {
  ScenarioConfig cfg = load_config("fig3_top.json");
  FieldSpec spec = cfg.incoherent_field_spec();
  TimeGrid grid = TimeGrid::from_fs(0.0, 300.0, 0.05);

  const int n_seeds = 1000;
  double count_sum = 0.0;
  std::vector<double> phases;
  std::vector<double> shifts;
  for (int k = 0; k < n_seeds; ++k) {
    const std::uint64_t seed =
        derive_stream_seed(SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)});
    LightField f = synthesize(spec, grid, seed);
    count_sum += static_cast<double>(f.jump_record().size());
    for (const FieldJump& j : f.jump_record()) {
      phases.push_back(j.phase);
      shifts.push_back(j.delta_omega);
    }
  }
  const double lambda = 200.0 / 7.0;
  const double mean_count = count_sum / n_seeds;
  const double count_tol = 3.0 * std::sqrt(lambda / n_seeds);
  const bool counts_ok = std::abs(mean_count - lambda) <= count_tol;

  // Long-support envelope for the inter-arrival law: the 200 fs window
  // censors long intervals strongly enough to fail an exact-exponential KS
  // test at this sample size, so the law is checked where censoring is
  // negligible.
  FieldSpec long_spec = spec;
  long_spec.envelope.shape = SinePowerEnvelope{fs_to_au(4000.0), 0.1};
  TimeGrid long_grid = TimeGrid::from_fs(0.0, 4000.0, 1.0);
  std::vector<double> intervals;
  for (int k = 0; k < n_seeds; ++k) {
    const std::uint64_t seed =
        derive_stream_seed(SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)});
    LightField f = synthesize(long_spec, long_grid, seed);
    double prev = 0.0;
    for (const FieldJump& j : f.jump_record()) {
      intervals.push_back(au_to_fs(j.time - prev));
      prev = j.time;
    }
  }
  const double d_exp = teststats::ks_distance(
      intervals, [](double x) { return teststats::exponential_cdf(x, 7.0); });
  const double d_exp_crit = teststats::ks_critical_001(intervals.size());

  const double d_phi = teststats::ks_distance(
      phases, [](double x) { return teststats::uniform_cdf(x, -M_PI, M_PI); });
  const double d_phi_crit = teststats::ks_critical_001(phases.size());
  const double d_dw = teststats::ks_distance(
      shifts, [](double x) { return teststats::uniform_cdf(x, -0.0175, 0.0175); });
  const double d_dw_crit = teststats::ks_critical_001(shifts.size());

  const bool pass = counts_ok && d_exp < d_exp_crit && d_phi < d_phi_crit && d_dw < d_dw_crit;
  report(5, "field statistics", pass,
         fmt("mean count=%.2f vs %.2f+-%.2f; KS exp=%.4f<%.4f phi=%.4f<%.4f dw=%.4f<%.4f",
             mean_count, lambda, count_tol, d_exp, d_exp_crit, d_phi, d_phi_crit, d_dw,
             d_dw_crit));
}

// ---------------------------------------------------------------------------
// 6. Flux equality
void check_flux_equality() {
  ScenarioConfig cfg = load_config("fig3_top.json");
  TimeGrid time = cfg.make_time_grid();
  LightField coherent = synthesize(cfg.coherent_field_spec(), time, 0);
  double worst = 0.0;
  for (int k = 0; k < cfg.realizations; ++k) {
    const std::uint64_t seed =
        derive_stream_seed(SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)});
    LightField f =
        normalize_flux(synthesize(cfg.incoherent_field_spec(), time, seed), coherent.flux());
    worst = std::max(worst, std::abs(f.flux() / coherent.flux() - 1.0));
  }
  report(6, "flux equality", worst < 1e-12,
         fmt("worst relative flux mismatch=%.2e (need <1e-12, %d realizations)", worst,
             cfg.realizations));
}

// ---------------------------------------------------------------------------
// 7. Spectral match
void check_spectral_match() {
  ScenarioConfig cfg = load_config("fig3_top.json");
  TimeGrid time = cfg.make_time_grid();
  LightField coherent = synthesize(cfg.coherent_field_spec(), time, 0);
  SpectralDensity coh = spectrum(coherent);

  const int n_real = 200;
  std::vector<SpectralDensity> spectra(n_real);
  std::vector<std::function<void()>> tasks;
  for (int k = 0; k < n_real; ++k) {
    tasks.emplace_back([&, k] {
      const std::uint64_t seed =
          derive_stream_seed(SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)});
      LightField f =
          normalize_flux(synthesize(cfg.incoherent_field_spec(), time, seed), coherent.flux());
      spectra[static_cast<std::size_t>(k)] = spectrum(f);
    });
  }
  detail::run_parallel(tasks, 2);
  SpectralDensity inc = average_spectra(spectra);

  const bool centers_ok =
      std::abs(coh.center - 0.1) < 0.005 && std::abs(inc.center - 0.1) < 0.005;
  const double ratio = inc.fwhm / coh.fwhm;
  const bool fwhm_ok = ratio >= 0.5 && ratio <= 2.0;
  report(7, "spectral match", centers_ok && fwhm_ok,
         fmt("centers coh=%.4f inc=%.4f (need 0.100+-0.005); fwhm coh=%.4f inc=%.4f ratio=%.2f "
             "(need 0.5..2)",
             coh.center, inc.center, coh.fwhm, inc.fwhm, ratio));
}

// ---------------------------------------------------------------------------
// Scenario ensembles shared by checks 8, 9, 10
struct ScenarioEnsemble {
  std::string name;
  CoherenceTrace coherent;
  std::optional<VarianceProbe> coherent_variance;
  std::vector<CoherenceTrace> incoherent;
  std::vector<VarianceProbe> incoherent_variance;
  EnsembleResult ensemble;
  double max_abs_c = 0.0;
};

ScenarioEnsemble run_scenario_ensemble(const std::string& config_name, bool with_variance) {
  ScenarioConfig cfg = load_config(config_name);
  TimeGrid time = cfg.make_time_grid();
  RadialGrid grid = cfg.make_radial_grid();
  LightField coherent = synthesize(cfg.coherent_field_spec(), time, 0);
  std::vector<LightField> fields;
  for (int k = 0; k < cfg.realizations; ++k) {
    const std::uint64_t seed =
        derive_stream_seed(SeedPolicy{cfg.master_seed, static_cast<std::uint64_t>(k)});
    fields.push_back(
        normalize_flux(synthesize(cfg.incoherent_field_spec(), time, seed), coherent.flux()));
  }
  EigenState ground =
      bound_states(cfg.ground_channel, grid, cfg.vibrational_level + 1).states.back();

  auto make_run = [&](const ChannelSpec& ch) {
    PropagationRun run;
    run.channel = ch;
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

  PairOptions options;
  options.trace_stride = cfg.snapshot_stride;
  if (with_variance) options.variance_probe_time = fs_to_au(100.0);

  ScenarioEnsemble out;
  out.name = cfg.name;
  std::vector<PairResult> results(static_cast<std::size_t>(cfg.realizations) + 1);
  std::vector<std::function<void()>> tasks;
  tasks.emplace_back(
      [&] { results[0] = propagate_coherence_pair(run1, run2, coherent, options); });
  for (int k = 0; k < cfg.realizations; ++k) {
    tasks.emplace_back([&, k] {
      results[static_cast<std::size_t>(k) + 1] =
          propagate_coherence_pair(run1, run2, fields[static_cast<std::size_t>(k)], options);
    });
  }
  detail::run_parallel(tasks, 2);

  out.coherent = results[0].trace;
  out.coherent_variance = results[0].variance;
  std::vector<CoherenceTrace> traces;
  for (int k = 0; k < cfg.realizations; ++k) {
    out.incoherent.push_back(results[static_cast<std::size_t>(k) + 1].trace);
    traces.push_back(results[static_cast<std::size_t>(k) + 1].trace);
    if (results[static_cast<std::size_t>(k) + 1].variance) {
      out.incoherent_variance.push_back(*results[static_cast<std::size_t>(k) + 1].variance);
    }
  }
  out.ensemble = ensemble_average(std::move(traces));

  for (const CoherenceTrace* t : {&out.coherent, &out.ensemble.ensemble}) {
    for (const std::complex<double>& c : t->c) {
      out.max_abs_c = std::max(out.max_abs_c, std::abs(c));
    }
  }
  for (const CoherenceTrace& t : out.incoherent) {
    for (const std::complex<double>& c : t.c) out.max_abs_c = std::max(out.max_abs_c, std::abs(c));
  }
  return out;
}

double window_mean(const std::vector<double>& times, const std::vector<double>& values,
                   double t_min) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= t_min) {
      sum += values[k];
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

std::vector<double> abs_trace(const std::vector<std::complex<double>>& c) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::abs(c[i]);
  return out;
}

// 8. Coherence bounds and field-rescaling invariance
void check_coherence_bounds(const std::vector<ScenarioEnsemble>& ensembles) {
  double max_c = 0.0;
  for (const ScenarioEnsemble& e : ensembles) max_c = std::max(max_c, e.max_abs_c);
  const bool bound_ok = max_c <= 0.5 + 1e-12;

  // Rescaling invariance on a short bound-dynamics run.
  ScenarioConfig cfg = load_config("fig3_bottom.json");
  RadialGrid grid = cfg.make_radial_grid();
  TimeGrid time = TimeGrid::from_fs(0.0, 12.0, 0.003);
  EigenState ground =
      bound_states(cfg.ground_channel, grid, cfg.vibrational_level + 1).states.back();
  auto make_run = [&](const ChannelSpec& ch) {
    PropagationRun run;
    run.channel = ch;
    run.dipole = cfg.dipole;
    run.source = ground;
    run.grid = grid;
    run.time = time;
    run.snapshot_stride = 100;
    return run;
  };
  PropagationRun run1 = make_run(cfg.excited_channel_1);
  PropagationRun run2 = make_run(cfg.excited_channel_2);
  LightField base_field = synthesize(cfg.coherent_field_spec(), time, 0);
  PairOptions opt;
  opt.trace_stride = 100;
  PairResult base = propagate_coherence_pair(run1, run2, base_field, opt);
  double worst = 0.0;
  for (double alpha : {2.0, 1.3}) {
    LightField scaled = base_field;
    scaled.rescale(alpha);
    PairResult res = propagate_coherence_pair(run1, run2, scaled, opt);
    for (std::size_t k = 0; k < base.trace.c.size(); ++k) {
      worst = std::max(worst, std::abs(res.trace.c[k] - base.trace.c[k]));
    }
  }
  report(8, "coherence bounds", bound_ok && worst <= 1e-10,
         fmt("max |C|=%.6f (need <=0.5); rescale drift=%.2e (need <=1e-10)", max_c, worst));
}

// 9. Ensemble coherence decays much faster under incoherent light
void check_fig3(const std::vector<ScenarioEnsemble>& ensembles) {
  bool pass = true;
  std::string detail;
  const double t_min = fs_to_au(200.0);
  for (const ScenarioEnsemble& e : ensembles) {
    const double coh = window_mean(e.coherent.times, abs_trace(e.coherent.c), t_min);
    const double inc_ens =
        window_mean(e.ensemble.ensemble.times, abs_trace(e.ensemble.ensemble.c), t_min);
    const double inc_mean =
        window_mean(e.ensemble.ensemble.times, e.ensemble.mean_abs_c, t_min);
    bool ok = inc_ens < 0.5 * coh && inc_mean < 0.5 * coh;
    if (e.name == "fig3_bottom") {
      // Bound Morse pair under the coherent pulse decays gradually, not
      // immediately: the final window still holds a sizable fraction of the
      // peak coherence.
      double c_max = 0.0;
      for (const std::complex<double>& c : e.coherent.c) c_max = std::max(c_max, std::abs(c));
      ok = ok && coh > 0.3 * c_max;
      detail += fmt("[gradual: final/peak=%.2f] ", coh / c_max);
    }
    pass = pass && ok;
    detail += fmt("%s coh=%.4f ens=%.4f mean=%.4f%s  ", e.name.c_str(), coh, inc_ens, inc_mean,
                  ok ? "" : " <-FAIL");
  }
  report(9, "ensemble coherence decay", pass, detail + "(need inc < 0.5*coh over final 100 fs)");
}

// 10. Incoherent excitation spreads the packets faster
void check_fig2(const ScenarioEnsemble& top) {
  int wins = 0;
  const double var_coh = top.coherent_variance ? top.coherent_variance->variance1 : 0.0;
  for (const VarianceProbe& p : top.incoherent_variance) {
    if (p.variance1 > var_coh) ++wins;
  }
  const int total = static_cast<int>(top.incoherent_variance.size());
  report(10, "spatial spreading", wins >= 8 && total == 10,
         fmt("incoherent packet variance beats coherent (%.1f Bohr^2) in %d/%d seeds at t~100 fs "
             "(need >=8/10)",
             var_coh, wins, total));
}

// 11. Determinism of run_scenario
void check_determinism() {
  ScenarioConfig cfg = load_config("mini_bound.json");
  fs::path base = fs::temp_directory_path() / "wpdyn_acceptance_det";
  fs::remove_all(base);
  run_scenario(cfg, Stage::all, base / "a", 2);
  run_scenario(cfg, Stage::all, base / "b", 1);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int compared = 0;
  int mismatched = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    ++compared;
    if (slurp(entry.path()) != slurp(base / "b" / entry.path().filename())) ++mismatched;
  }
  fs::remove_all(base);
  report(11, "byte-identical reruns", compared > 10 && mismatched == 0,
         fmt("%d files compared, %d mismatched (different worker counts)", compared, mismatched));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    check_delta_replica();
    check_eigensolver_oracles();
    check_unitarity();
    check_superposition();
    check_field_statistics();
    check_flux_equality();
    check_spectral_match();

    std::vector<ScenarioEnsemble> ensembles;
    for (const char* name : {"fig3_top.json", "fig3_middle.json", "fig3_bottom.json"}) {
      const auto ts = std::chrono::steady_clock::now();
      ensembles.push_back(run_scenario_ensemble(name, std::string(name) == "fig3_top.json"));
      std::printf("      ... %s ensemble in %.0f s\n", name,
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count());
      std::fflush(stdout);
    }
    check_coherence_bounds(ensembles);
    check_fig3(ensembles);
    check_fig2(ensembles.front());
    check_determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL  --  acceptance aborted: %s\n", e.what());
    return 1;
  }

  int failed = 0;
  for (const CheckResult& r : g_results) {
    if (!r.pass) ++failed;
  }
  std::printf("----\n%d/%d acceptance checks passed in %.0f s\n",
              static_cast<int>(g_results.size()) - failed, static_cast<int>(g_results.size()),
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return failed == 0 ? 0 : 1;
}
