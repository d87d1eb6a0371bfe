// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpdyn/eigensolver.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/fft_util.hpp"
#include "wpdyn/field.hpp"
#include "wpdyn/grids.hpp"
#include "wpdyn/potentials.hpp"
#include "wpdyn/quadrature.hpp"

namespace wpdyn {

/// Negative-imaginary monomial potential -i * strength * ((R-start)/(r_max-start))^power
/// for R > start; removes outgoing flux before it can reflect off the grid edge.
struct AbsorberSpec {
  double start = 120.0;     // Bohr
  double strength = 0.01;   // Hartree
  double power = 2.0;
};

struct RadialWavepacket {
  double time = 0.0;                     // a.u.
  std::vector<std::complex<double>> u;   // full grid, endpoints zero
};

struct WavepacketSeries {
  RadialGrid grid{0.1, 1.0, 2};
  TimeGrid time{0.0, 1.0, 1.0};
  int snapshot_stride = 1;
  std::vector<RadialWavepacket> snapshots;
  /// Trapezoid norm^2 at every step boundary (n_steps + 1 entries).
  std::vector<double> population;
  /// Cumulative norm^2 removed by the absorber, same indexing.
  std::vector<double> absorbed;
  bool weak_field_ok = true;
};

struct PropagationRun {
  ChannelSpec channel;
  DipoleSpec dipole;
  EigenState source;  // ground eigenstate; must live on `grid`
  RadialGrid grid{0.1, 1.0, 2};
  TimeGrid time{0.0, 1.0, 1.0};
  int snapshot_stride = 100;
  std::optional<AbsorberSpec> absorber;
};

namespace detail {

// One time step advances u by
//   exp(-i T dt/2) exp(-i Vc dt/2) [ . + dt*src(t_mid) ] exp(-i Vc dt/2) exp(-i T dt/2)
// with Vc = V - i*Gamma. The two inner potential half-factors form the exact
// diagonal factor of a Strang split; the kinetic factor is the three-point
// finite-difference operator diagonalized exactly by the DST-I basis, so the
// homogeneous flow is unitary (absorber off) and shares its eigenpairs with
// the eigensolver's Hamiltonian. The state is kept in DST space between
// steps; each step costs one inverse and one forward transform.
class SplitStepCore {
 public:
  SplitStepCore(const RadialGrid& grid, std::span<const double> v_full, double mu, double dt,
                const std::optional<AbsorberSpec>& absorber)
      : grid_(grid),
        m_(static_cast<std::size_t>(grid.n_interior())),
        dst_(m_),
        snap_dst_(m_),
        kin_half_(m_),
        pot_in_(m_),
        pot_out_(m_),
        loss_factor_(absorber ? m_ : 0),
        has_absorber_(absorber.has_value()) {
    detail::require(grid.n_interior() >= 2, "propagate: grid too small");
    detail::require(mu > 0.0, "propagate: reduced mass must be > 0");
    const double dr = grid.dr();
    const double inv_scale = 1.0 / (2.0 * static_cast<double>(m_ + 1));
    if (absorber) {
      detail::require(absorber->start < grid.r_max(),
                      "absorber.start_bohr: must lie inside the grid");
      detail::require(absorber->strength >= 0.0, "absorber.strength_hartree: must be >= 0");
      detail::require(absorber->power > 0.0, "absorber.power: must be > 0");
    }
    for (std::size_t j = 0; j < m_; ++j) {
      const double r = grid.point(static_cast<int>(j) + 1);
      const double v = v_samples_at(v_full, j);
      double gamma = 0.0;
      if (absorber && r > absorber->start) {
        double x = (r - absorber->start) / (grid.r_max() - absorber->start);
        gamma = absorber->strength * std::pow(x, absorber->power);
      }
      const double damp = std::exp(-gamma * dt * 0.5);
      const std::complex<double> phase = std::polar(damp, -v * dt * 0.5);
      pot_in_[j] = phase * inv_scale;
      pot_out_[j] = phase;
      if (absorber) loss_factor_[j] = 1.0 - damp * damp;
    }
    for (std::size_t n = 1; n <= m_; ++n) {
      const double t_n = (1.0 - std::cos(M_PI * static_cast<double>(n) /
                                         static_cast<double>(m_ + 1))) /
                         (mu * dr * dr);
      kin_half_[n - 1] = std::polar(1.0, -t_n * dt * 0.5);
    }
  }

  void load_zero() {
    for (std::size_t j = 0; j < m_; ++j) dst_.data()[j] = 0.0;
  }

  /// Load a real-space state given on the full grid (endpoints ignored).
  void load(std::span<const std::complex<double>> u_full) {
    detail::require(u_full.size() == static_cast<std::size_t>(grid_.n_points()),
                    "propagate: initial state size does not match the grid");
    for (std::size_t j = 0; j < m_; ++j) dst_.data()[j] = u_full[j + 1];
    dst_.execute();  // enter spectral space
  }

  /// Copy the current state out to real space (full grid, zero endpoints).
  void extract(std::vector<std::complex<double>>& u_full) {
    const double scale = 1.0 / (2.0 * static_cast<double>(m_ + 1));
    for (std::size_t j = 0; j < m_; ++j) snap_dst_.data()[j] = dst_.data()[j];
    snap_dst_.execute();
    u_full.assign(static_cast<std::size_t>(grid_.n_points()), 0.0);
    for (std::size_t j = 0; j < m_; ++j) u_full[j + 1] = snap_dst_.data()[j] * scale;
  }

  /// Advance one step. src_coeff already includes the dt factor.
  void step(std::complex<double> src_coeff, const double* src_profile) {
    std::complex<double>* s = dst_.data();
    for (std::size_t n = 0; n < m_; ++n) s[n] *= kin_half_[n];
    dst_.execute();  // to real space, scaled by 2(m+1)
    if (has_absorber_) {
      const double inv = 1.0 / (2.0 * static_cast<double>(m_ + 1));
      double loss = 0.0;
      for (std::size_t j = 0; j < m_; ++j) {
        loss += std::norm(s[j] * inv) * loss_factor_[j];
        s[j] *= pot_in_[j];
      }
      if (src_coeff != 0.0 && src_profile) {
        for (std::size_t j = 0; j < m_; ++j) s[j] += src_coeff * src_profile[j];
      }
      for (std::size_t j = 0; j < m_; ++j) {
        loss += std::norm(s[j]) * loss_factor_[j];
        s[j] *= pot_out_[j];
      }
      absorbed_ += loss * grid_.dr();
    } else {
      for (std::size_t j = 0; j < m_; ++j) s[j] *= pot_in_[j];
      if (src_coeff != 0.0 && src_profile) {
        for (std::size_t j = 0; j < m_; ++j) s[j] += src_coeff * src_profile[j];
      }
      for (std::size_t j = 0; j < m_; ++j) s[j] *= pot_out_[j];
    }
    dst_.execute();  // back to spectral space
    for (std::size_t n = 0; n < m_; ++n) s[n] *= kin_half_[n];
  }

  /// Trapezoid norm^2 of the current state (Parseval, no transform needed).
  double population() const {
    const std::complex<double>* s = dst_.data();
    double sum = 0.0;
    for (std::size_t n = 0; n < m_; ++n) sum += std::norm(s[n]);
    return sum * grid_.dr() / (2.0 * static_cast<double>(m_ + 1));
  }

  double absorbed() const { return absorbed_; }

 private:
  static double v_samples_at(std::span<const double> v_full, std::size_t j) {
    return v_full[j + 1];
  }

  RadialGrid grid_;
  std::size_t m_;
  ComplexDst dst_;
  ComplexDst snap_dst_;
  std::vector<std::complex<double>> kin_half_;
  std::vector<std::complex<double>> pot_in_;
  std::vector<std::complex<double>> pot_out_;
  std::vector<double> loss_factor_;
  bool has_absorber_ = false;
  double absorbed_ = 0.0;
};

inline void check_stable(double population, std::int64_t step) {
  if (!std::isfinite(population) || population > 1e6) {
    throw numerical_error("propagation unstable at step " + std::to_string(step) +
                          " (population " + std::to_string(population) + ")");
  }
}

/// Interior profile D(R) * u_g(R) of the source term.
inline std::vector<double> source_profile(const PropagationRun& run) {
  detail::require(run.source.grid == run.grid,
                  "propagate: source eigenstate grid does not match the propagation grid");
  const std::size_t m = static_cast<std::size_t>(run.grid.n_interior());
  std::vector<double> profile(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double r = run.grid.point(static_cast<int>(j) + 1);
    profile[j] = eval_dipole(run.dipole, r) * run.source.u[j + 1];
  }
  return profile;
}

}  // namespace detail

namespace detail {

/// Per-step source weight under the literal midpoint rule:
/// dt * E(t_mid) * exp(-i E_g t_mid).
template <typename FieldFn>
class MidpointWeight {
 public:
  MidpointWeight(FieldFn field, const TimeGrid& time, double e_g)
      : field_(std::move(field)), time_(time), e_g_(e_g) {}

  std::complex<double> operator()(std::int64_t k) const {
    const double t_mid = time_.t_start() + (static_cast<double>(k) + 0.5) * time_.dt();
    const double e_val = field_(t_mid);
    if (e_val == 0.0) return 0.0;
    return time_.dt() * e_val * std::polar(1.0, -e_g_ * t_mid);
  }

 private:
  FieldFn field_;
  TimeGrid time_;
  double e_g_;
};

/// Per-step source weight for a synthesized field: the integral of
/// E(tau) exp(-i E_g tau) over the step, split at the field's jump times so
/// the discontinuities never touch the quadrature, 2-point Gauss on each
/// smooth piece. For a jump-free field this is the midpoint rule plus an
/// O(dt^3) correction; with jumps it removes the O(dt) sampling error a
/// discontinuity inside a step would otherwise cause.
class JumpAwareWeight {
 public:
  JumpAwareWeight(const LightField& field, const TimeGrid& time, double e_g)
      : field_(field), time_(time), e_g_(e_g) {}

  std::complex<double> operator()(std::int64_t k) const {
    const double a = time_.t_start() + static_cast<double>(k) * time_.dt();
    const double b = a + time_.dt();
    const auto& jumps = field_.jump_record();
    auto it = std::upper_bound(jumps.begin(), jumps.end(), a,
                               [](double x, const FieldJump& j) { return x < j.time; });
    std::complex<double> total = 0.0;
    double lo = a;
    while (it != jumps.end() && it->time < b) {
      total += segment(lo, it->time);
      lo = it->time;
      ++it;
    }
    total += segment(lo, b);
    return total;
  }

 private:
  std::complex<double> segment(double x0, double x1) const {
    const double h = x1 - x0;
    if (h <= 0.0) return 0.0;
    constexpr double off = 0.28867513459481287;  // 1/(2 sqrt(3))
    const double ta = x0 + h * (0.5 - off);
    const double tb = x0 + h * (0.5 + off);
    std::complex<double> s = field_.value(ta) * std::polar(1.0, -e_g_ * ta) +
                             field_.value(tb) * std::polar(1.0, -e_g_ * tb);
    return 0.5 * h * s;
  }

  const LightField& field_;
  TimeGrid time_;
  double e_g_;
};

}  // namespace detail

/// Integrate the driven radial equation
///   du/dt = -i [ -(1/2mu) d^2/dR^2 + V^J(R) ] u + D(R) E(t) exp(-i E_g t) u_g(R)
/// from u = 0, storing a snapshot every snapshot_stride steps. Each step
/// injects one source increment, weighted by weight(k), between two
/// homogeneous half-steps.
template <typename WeightFn>
WavepacketSeries propagate_weighted(const PropagationRun& run, WeightFn&& weight) {
  detail::require(run.snapshot_stride >= 1, "propagate: snapshot_stride must be >= 1");
  std::vector<double> v = sample_potential(run.channel, run.grid);
  detail::SplitStepCore core(run.grid, v, run.channel.mu, run.time.dt(), run.absorber);
  std::vector<double> profile = detail::source_profile(run);

  WavepacketSeries series;
  series.grid = run.grid;
  series.time = run.time;
  series.snapshot_stride = run.snapshot_stride;
  const std::int64_t n_steps = run.time.n_steps();
  series.population.reserve(static_cast<std::size_t>(n_steps) + 1);
  series.absorbed.reserve(static_cast<std::size_t>(n_steps) + 1);

  core.load_zero();
  series.population.push_back(0.0);
  series.absorbed.push_back(0.0);
  RadialWavepacket snap;
  snap.time = run.time.t_start();
  core.extract(snap.u);
  series.snapshots.push_back(snap);

  for (std::int64_t k = 0; k < n_steps; ++k) {
    core.step(weight(k), profile.data());
    const double pop = core.population();
    detail::check_stable(pop, k + 1);
    series.population.push_back(pop);
    series.absorbed.push_back(core.absorbed());
    if ((k + 1) % run.snapshot_stride == 0) {
      RadialWavepacket s;
      s.time = run.time.time(k + 1);
      core.extract(s.u);
      series.snapshots.push_back(std::move(s));
    }
  }
  series.weak_field_ok = series.population.back() + series.absorbed.back() < 0.1;
  return series;
}

/// Driven propagation with the source sampled at step midpoints. `field` is
/// any callable double(double t_au).
template <typename FieldFn>
WavepacketSeries propagate_with(const PropagationRun& run, FieldFn&& field) {
  return propagate_weighted(
      run, detail::MidpointWeight<std::decay_t<FieldFn>>(std::forward<FieldFn>(field), run.time,
                                                         run.source.energy));
}

/// Driven propagation under a synthesized light field. The field must have
/// been sampled on the propagation time grid. Source weights integrate the
/// field exactly across its phase/frequency jumps.
inline WavepacketSeries propagate(const PropagationRun& run, const LightField& field) {
  detail::require(field.grid() == run.time,
                  "propagate: field and propagation do not share a time grid");
  return propagate_weighted(run, detail::JumpAwareWeight(field, run.time, run.source.energy));
}

/// Source-free evolution of an initial state under one channel. Used for
/// validation; the absorber defaults to off.
inline WavepacketSeries propagate_homogeneous(
    std::span<const std::complex<double>> u0, const ChannelSpec& channel,
    const RadialGrid& grid, const TimeGrid& time, int snapshot_stride = 1,
    const std::optional<AbsorberSpec>& absorber = std::nullopt) {
  detail::require(snapshot_stride >= 1, "propagate: snapshot_stride must be >= 1");
  std::vector<double> v = sample_potential(channel, grid);
  detail::SplitStepCore core(grid, v, channel.mu, time.dt(), absorber);
  core.load(u0);

  WavepacketSeries series;
  series.grid = grid;
  series.time = time;
  series.snapshot_stride = snapshot_stride;
  series.population.push_back(core.population());
  series.absorbed.push_back(0.0);
  RadialWavepacket snap;
  snap.time = time.t_start();
  core.extract(snap.u);
  series.snapshots.push_back(snap);

  for (std::int64_t k = 0; k < time.n_steps(); ++k) {
    core.step(0.0, nullptr);
    const double pop = core.population();
    detail::check_stable(pop, k + 1);
    series.population.push_back(pop);
    series.absorbed.push_back(core.absorbed());
    if ((k + 1) % snapshot_stride == 0) {
      RadialWavepacket s;
      s.time = time.time(k + 1);
      core.extract(s.u);
      series.snapshots.push_back(std::move(s));
    }
  }
  series.weak_field_ok = true;
  return series;
}

/// Check the stepped solution against the explicit sum over delta-pulse
/// replicas: every quadrature node launches D(R) u_g(R) with weight
/// E(tau) exp(-i E_g tau) dtau and evolves homogeneously to the end of the
/// window. Returns the overlap fidelity between the two final states.
template <typename FieldFn>
double superposition_sum_check(const PropagationRun& run, FieldFn&& field, double quad_dt) {
  PropagationRun final_only = run;
  final_only.snapshot_stride = static_cast<int>(run.time.n_steps());
  WavepacketSeries stepped = propagate_with(final_only, field);
  const std::vector<std::complex<double>>& u_prop = stepped.snapshots.back().u;

  std::vector<double> profile = detail::source_profile(run);
  const double t_end = run.time.t_end();
  std::vector<std::complex<double>> replica(static_cast<std::size_t>(run.grid.n_points()));
  std::vector<std::complex<double>> sum(static_cast<std::size_t>(run.grid.n_points()), 0.0);
  const std::int64_t n_nodes =
      static_cast<std::int64_t>(std::floor((t_end - run.time.t_start()) / quad_dt));
  for (std::int64_t j = 0; j < n_nodes; ++j) {
    const double tau = run.time.t_start() + (static_cast<double>(j) + 0.5) * quad_dt;
    const double e_val = field(tau);
    if (e_val == 0.0) continue;
    const std::complex<double> w = quad_dt * e_val * std::polar(1.0, -run.source.energy * tau);
    std::fill(replica.begin(), replica.end(), std::complex<double>(0.0));
    for (std::size_t i = 0; i < profile.size(); ++i) replica[i + 1] = w * profile[i];
    const double span = t_end - tau;
    const std::int64_t n = std::max<std::int64_t>(1, std::llround(span / run.time.dt()));
    TimeGrid leg(tau, t_end, span / static_cast<double>(n));
    WavepacketSeries evolved = propagate_homogeneous(replica, run.channel, run.grid, leg,
                                                     static_cast<int>(n), run.absorber);
    const std::vector<std::complex<double>>& uf = evolved.snapshots.back().u;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += uf[i];
  }

  const double na = trapezoid_norm_sq(run.grid, u_prop);
  const double nb = trapezoid_norm_sq(run.grid, sum);
  if (na < 1e-60 && nb < 1e-60) return 1.0;  // both zero: degenerate case
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const std::complex<double> ov = trapezoid_overlap(run.grid, u_prop, sum);
  return std::norm(ov) / (na * nb);
}

}  // namespace wpdyn
