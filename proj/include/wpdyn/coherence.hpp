// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wpdyn/errors.hpp"
#include "wpdyn/propagator.hpp"
#include "wpdyn/quadrature.hpp"

namespace wpdyn {

/// Populations below this are treated as "nothing excited yet" and C is
/// reported as exactly zero instead of 0/0.
inline constexpr double k_population_epsilon = 1e-20;

/// Electronic coherence between the two excited channels:
///   rho12(t) = integral of conj(u1) u2 dR,  C(t) = rho12 / (rho11 + rho22).
struct CoherenceTrace {
  std::vector<double> times;  // a.u.
  std::vector<std::complex<double>> rho12;
  std::vector<double> rho11;
  std::vector<double> rho22;
  std::vector<std::complex<double>> c;
};

namespace detail {
inline std::complex<double> guarded_c(std::complex<double> rho12, double rho11, double rho22) {
  const double denom = rho11 + rho22;
  if (denom < k_population_epsilon) return 0.0;
  return rho12 / denom;
}
}  // namespace detail

/// Overlaps at every shared snapshot. Both series must come from the same
/// field realization on the same grids.
inline CoherenceTrace coherence_trace(const WavepacketSeries& s1, const WavepacketSeries& s2) {
  detail::require(s1.grid == s2.grid, "coherence: series do not share a radial grid");
  detail::require(s1.snapshots.size() == s2.snapshots.size(),
                  "coherence: series do not share snapshot times");
  CoherenceTrace trace;
  const std::size_t n = s1.snapshots.size();
  trace.times.reserve(n);
  trace.rho12.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    detail::require(s1.snapshots[k].time == s2.snapshots[k].time,
                    "coherence: series do not share snapshot times");
    trace.times.push_back(s1.snapshots[k].time);
    const auto& u1 = s1.snapshots[k].u;
    const auto& u2 = s2.snapshots[k].u;
    const std::complex<double> r12 = trapezoid_overlap(s1.grid, u1, u2);
    const double r11 = trapezoid_norm_sq(s1.grid, u1);
    const double r22 = trapezoid_norm_sq(s1.grid, u2);
    trace.rho12.push_back(r12);
    trace.rho11.push_back(r11);
    trace.rho22.push_back(r22);
    trace.c.push_back(detail::guarded_c(r12, r11, r22));
  }
  return trace;
}

/// Ensemble of realizations. The primary observable averages the density
/// matrix elements over realizations before normalizing (c of the averaged
/// matrix); the mean of per-realization |C| is kept alongside for audit.
struct EnsembleResult {
  int realization_count = 0;
  std::vector<CoherenceTrace> traces;
  CoherenceTrace ensemble;
  std::vector<double> mean_abs_c;
};

inline EnsembleResult ensemble_average(std::vector<CoherenceTrace> traces) {
  detail::require(!traces.empty(), "ensemble_average: no traces");
  const std::size_t n = traces.front().times.size();
  for (const CoherenceTrace& t : traces) {
    detail::require(t.times == traces.front().times,
                    "ensemble_average: traces do not share a time grid");
    detail::require(t.rho12.size() == n, "ensemble_average: malformed trace");
  }
  EnsembleResult result;
  result.realization_count = static_cast<int>(traces.size());
  result.ensemble.times = traces.front().times;
  result.ensemble.rho12.assign(n, 0.0);
  result.ensemble.rho11.assign(n, 0.0);
  result.ensemble.rho22.assign(n, 0.0);
  result.mean_abs_c.assign(n, 0.0);
  for (const CoherenceTrace& t : traces) {
    for (std::size_t k = 0; k < n; ++k) {
      result.ensemble.rho12[k] += t.rho12[k];
      result.ensemble.rho11[k] += t.rho11[k];
      result.ensemble.rho22[k] += t.rho22[k];
      result.mean_abs_c[k] += std::abs(t.c[k]);
    }
  }
  const double inv = 1.0 / static_cast<double>(traces.size());
  result.ensemble.c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.ensemble.rho12[k] *= inv;
    result.ensemble.rho11[k] *= inv;
    result.ensemble.rho22[k] *= inv;
    result.mean_abs_c[k] *= inv;
    result.ensemble.c[k] = detail::guarded_c(result.ensemble.rho12[k], result.ensemble.rho11[k],
                                             result.ensemble.rho22[k]);
  }
  result.traces = std::move(traces);
  return result;
}

/// |u(R_i, t_j)|^2 sampled on a decimated grid, for heat-map export.
struct DensityMatrix {
  std::vector<double> times;   // a.u.
  std::vector<double> radii;   // Bohr
  std::vector<double> values;  // row-major [time][radius]
};

struct DensityOptions {
  int time_stride = 10;   // in units of trace points
  int space_stride = 10;  // in grid points
};

struct VarianceProbe {
  double time = 0.0;  // snapshot time actually used, a.u.
  double variance1 = 0.0;
  double variance2 = 0.0;
};

struct PairOptions {
  int trace_stride = 100;  // steps between trace evaluations
  std::optional<DensityOptions> density;
  std::optional<double> variance_probe_time;  // a.u.
};

struct PairResult {
  CoherenceTrace trace;
  std::optional<DensityMatrix> density1;
  std::optional<DensityMatrix> density2;
  std::optional<VarianceProbe> variance;
  double final_population1 = 0.0;
  double final_population2 = 0.0;
  double absorbed1 = 0.0;
  double absorbed2 = 0.0;
  bool weak_field_ok = true;
};

namespace detail {

inline void append_density_row(DensityMatrix& d, double t, std::span<const std::complex<double>> u,
                               const RadialGrid& grid, int space_stride) {
  if (d.radii.empty()) {
    for (int i = 0; i < grid.n_points(); i += space_stride) d.radii.push_back(grid.point(i));
  }
  d.times.push_back(t);
  for (int i = 0; i < grid.n_points(); i += space_stride) {
    d.values.push_back(std::norm(u[static_cast<std::size_t>(i)]));
  }
}

inline double spatial_variance(const RadialGrid& grid, std::span<const std::complex<double>> u) {
  double w = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < grid.n_points(); ++i) {
    const double p = std::norm(u[static_cast<std::size_t>(i)]);
    const double r = grid.point(i);
    w += p;
    m1 += p * r;
    m2 += p * r * r;
  }
  if (w <= 0.0) return 0.0;
  m1 /= w;
  m2 /= w;
  return m2 - m1 * m1;
}

}  // namespace detail

/// Drive both excited channels through one shared field realization in
/// lockstep and accumulate the coherence trace on the fly. Produces exactly
/// the numbers coherence_trace(propagate(run1, f), propagate(run2, f)) would,
/// without retaining full snapshot series.
template <typename WeightFn>
PairResult propagate_pair_weighted(const PropagationRun& run1, const PropagationRun& run2,
                                   WeightFn&& weight, const PairOptions& options) {
  detail::require(run1.grid == run2.grid, "pair: channels do not share a radial grid");
  detail::require(run1.time == run2.time, "pair: channels do not share a time grid");
  detail::require(run1.source.energy == run2.source.energy && run1.source.u == run2.source.u,
                  "pair: channels must be driven from the same ground state");
  detail::require(options.trace_stride >= 1, "pair: trace_stride must be >= 1");

  std::vector<double> v1 = sample_potential(run1.channel, run1.grid);
  std::vector<double> v2 = sample_potential(run2.channel, run2.grid);
  detail::SplitStepCore core1(run1.grid, v1, run1.channel.mu, run1.time.dt(), run1.absorber);
  detail::SplitStepCore core2(run2.grid, v2, run2.channel.mu, run2.time.dt(), run2.absorber);
  std::vector<double> profile1 = detail::source_profile(run1);
  std::vector<double> profile2 = detail::source_profile(run2);
  core1.load_zero();
  core2.load_zero();

  PairResult result;
  if (options.density) {
    result.density1.emplace();
    result.density2.emplace();
  }
  std::int64_t probe_index = -1;
  if (options.variance_probe_time) {
    const double rel = (*options.variance_probe_time - run1.time.t_start()) / run1.time.dt();
    probe_index = std::llround(rel / options.trace_stride) * options.trace_stride;
  }

  std::vector<std::complex<double>> u1;
  std::vector<std::complex<double>> u2;
  const std::int64_t n_steps = run1.time.n_steps();
  std::int64_t trace_count = 0;
  auto record = [&](std::int64_t k) {
    const double t = run1.time.time(k);
    core1.extract(u1);
    core2.extract(u2);
    const std::complex<double> r12 = trapezoid_overlap(run1.grid, u1, u2);
    const double r11 = trapezoid_norm_sq(run1.grid, u1);
    const double r22 = trapezoid_norm_sq(run1.grid, u2);
    result.trace.times.push_back(t);
    result.trace.rho12.push_back(r12);
    result.trace.rho11.push_back(r11);
    result.trace.rho22.push_back(r22);
    result.trace.c.push_back(detail::guarded_c(r12, r11, r22));
    if (options.density && trace_count % options.density->time_stride == 0) {
      detail::append_density_row(*result.density1, t, u1, run1.grid, options.density->space_stride);
      detail::append_density_row(*result.density2, t, u2, run1.grid, options.density->space_stride);
    }
    if (probe_index >= 0 && k == probe_index) {
      VarianceProbe probe;
      probe.time = t;
      probe.variance1 = detail::spatial_variance(run1.grid, u1);
      probe.variance2 = detail::spatial_variance(run1.grid, u2);
      result.variance = probe;
    }
    ++trace_count;
  };

  record(0);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const std::complex<double> coeff = weight(k);
    core1.step(coeff, profile1.data());
    core2.step(coeff, profile2.data());
    if ((k + 1) % options.trace_stride == 0) record(k + 1);
    if ((k + 1) % 1000 == 0) {
      detail::check_stable(core1.population(), k + 1);
      detail::check_stable(core2.population(), k + 1);
    }
  }
  result.final_population1 = core1.population();
  result.final_population2 = core2.population();
  result.absorbed1 = core1.absorbed();
  result.absorbed2 = core2.absorbed();
  result.weak_field_ok = (result.final_population1 + result.absorbed1 < 0.1) &&
                         (result.final_population2 + result.absorbed2 < 0.1);
  return result;
}

/// Pair propagation with midpoint source sampling of an arbitrary callable.
template <typename FieldFn>
PairResult propagate_coherence_pair_with(const PropagationRun& run1, const PropagationRun& run2,
                                         FieldFn&& field, const PairOptions& options) {
  return propagate_pair_weighted(
      run1, run2,
      detail::MidpointWeight<std::decay_t<FieldFn>>(std::forward<FieldFn>(field), run1.time,
                                                    run1.source.energy),
      options);
}

/// Pair propagation under a synthesized field (jump-aware source weights,
/// matching propagate(run, field)).
inline PairResult propagate_coherence_pair(const PropagationRun& run1,
                                           const PropagationRun& run2, const LightField& field,
                                           const PairOptions& options) {
  detail::require(field.grid() == run1.time,
                  "pair: field and propagation do not share a time grid");
  return propagate_pair_weighted(
      run1, run2, detail::JumpAwareWeight(field, run1.time, run1.source.energy), options);
}

}  // namespace wpdyn
