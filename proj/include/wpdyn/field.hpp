// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "wpdyn/errors.hpp"
#include "wpdyn/grids.hpp"
#include "wpdyn/seeding.hpp"

namespace wpdyn {

struct GaussianEnvelope {
  double center = 0.0;  // a.u. time
  double width = 1.0;   // a.u. time (Gaussian sigma of the field envelope)
};

/// sin(pi t / duration)^exponent on [0, duration], zero elsewhere. Small
/// exponents give a near-flat-top pulse with soft edges.
struct SinePowerEnvelope {
  double duration = 1.0;  // a.u. time
  double exponent = 0.1;
};

struct EnvelopeSpec {
  std::variant<GaussianEnvelope, SinePowerEnvelope> shape;
  double peak_amplitude = 1e-4;  // field a.u.

  double value(double t) const {
    return peak_amplitude *
           std::visit(
               [t](const auto& s) -> double {
                 using T = std::decay_t<decltype(s)>;
                 if constexpr (std::is_same_v<T, GaussianEnvelope>) {
                   double x = (t - s.center) / s.width;
                   return std::exp(-0.5 * x * x);
                 } else {
                   if (t <= 0.0 || t >= s.duration) return 0.0;
                   return std::pow(std::sin(M_PI * t / s.duration), s.exponent);
                 }
               },
               shape);
  }

  /// Window the synthesis grid must cover. The Gaussian tail is truncated at
  /// three widths; the sine-power support is exact.
  std::pair<double, double> support() const {
    return std::visit(
        [](const auto& s) -> std::pair<double, double> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, GaussianEnvelope>) {
            return {s.center - 3.0 * s.width, s.center + 3.0 * s.width};
          } else {
            return {0.0, s.duration};
          }
        },
        shape);
  }
};

/// Statistics of the random interruptions that mimic incoherent light: jump
/// times are a homogeneous Poisson process; at each jump the frequency shift
/// and the carrier-envelope phase are redrawn uniformly on their ranges.
struct JumpProcessSpec {
  double mean_interval = 0.0;     // a.u. time
  double phase_range = M_PI;      // radians, jumps uniform in [-range, range]
  double freq_shift_range = 0.0;  // Hartree, uniform in [-range, range]
};

struct FieldSpec {
  EnvelopeSpec envelope;
  double omega_center = 0.1;  // Hartree
  /// Absent => coherent field (delta_omega = 0, phi = 0 for all t).
  std::optional<JumpProcessSpec> jumps;
};

struct FieldJump {
  double time = 0.0;         // a.u.
  double delta_omega = 0.0;  // Hartree, value after the jump
  double phase = 0.0;        // radians, value after the jump
};

/// E(t) = scale * env(t) * cos([omega + dw(t)] t + phi(t)) with dw, phi
/// piecewise constant between jumps (zero before the first jump). The sampled
/// series, the jump record, and the synthesis rule are kept together so the
/// field can be evaluated exactly at off-grid times (step midpoints).
class LightField {
 public:
  LightField(FieldSpec spec, TimeGrid grid, std::vector<FieldJump> jumps)
      : spec_(std::move(spec)), grid_(grid), jumps_(std::move(jumps)) {
    samples_.resize(static_cast<std::size_t>(grid_.n_samples()));
    for (std::int64_t k = 0; k < grid_.n_samples(); ++k) {
      samples_[static_cast<std::size_t>(k)] = value(grid_.time(k));
    }
    flux_ = trapezoid_flux();
  }

  const TimeGrid& grid() const { return grid_; }
  const FieldSpec& spec() const { return spec_; }
  std::span<const double> samples() const { return samples_; }
  const std::vector<FieldJump>& jump_record() const { return jumps_; }
  double scale() const { return scale_; }
  /// Trapezoidal integral of |E|^2 over the grid, a.u.
  double flux() const { return flux_; }

  /// Exact synthesis at arbitrary time, including any flux-normalization scale.
  double value(double t) const {
    double dw = 0.0;
    double phi = 0.0;
    if (!jumps_.empty() && t >= jumps_.front().time) {
      auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                                 [](double x, const FieldJump& j) { return x < j.time; });
      const FieldJump& j = *(it - 1);
      dw = j.delta_omega;
      phi = j.phase;
    }
    return spec_.envelope.value(t) * std::cos((spec_.omega_center + dw) * t + phi) * scale_;
  }

  /// Multiply the field by a constant. Samples are re-evaluated through
  /// value() so the stored series and off-grid evaluation stay bit-identical.
  void rescale(double factor) {
    scale_ *= factor;
    for (std::int64_t k = 0; k < grid_.n_samples(); ++k) {
      samples_[static_cast<std::size_t>(k)] = value(grid_.time(k));
    }
    flux_ = trapezoid_flux();
  }

 private:
  double trapezoid_flux() const {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < samples_.size(); ++i) s += samples_[i] * samples_[i];
    s += 0.5 * (samples_.front() * samples_.front() + samples_.back() * samples_.back());
    return s * grid_.dt();
  }

  FieldSpec spec_;
  TimeGrid grid_;
  std::vector<FieldJump> jumps_;
  std::vector<double> samples_;
  double scale_ = 1.0;
  double flux_ = 0.0;
};

/// Deterministic synthesis: identical (spec, grid, seed) gives bit-identical
/// samples. A coherent spec ignores the seed and records no jumps.
inline LightField synthesize(const FieldSpec& spec, const TimeGrid& grid, std::uint64_t seed) {
  auto [lo, hi] = spec.envelope.support();
  detail::require(grid.t_start() <= lo + 1e-12 && grid.t_end() >= hi - 1e-12,
                  "field: envelope support exceeds the time grid");
  detail::require(spec.omega_center > 0.0, "field.omega_center_hartree: must be > 0");

  std::vector<FieldJump> jumps;
  if (spec.jumps) {
    const JumpProcessSpec& jp = *spec.jumps;
    detail::require(jp.mean_interval > 0.0, "field.jumps.mean_interval_fs: must be > 0");
    detail::require(jp.phase_range >= 0.0 && jp.phase_range <= M_PI,
                    "field.jumps.phase_range_rad: must lie in [0, pi]");
    detail::require(jp.freq_shift_range >= 0.0,
                    "field.jumps.freq_shift_range_hartree: must be >= 0");
    Rng rng(seed);
    // Draw order per jump is fixed: waiting time, frequency shift, phase.
    double t = lo;
    for (;;) {
      t += rng.exponential(jp.mean_interval);
      if (t >= hi) break;
      FieldJump j;
      j.time = t;
      j.delta_omega = rng.uniform_range(-jp.freq_shift_range, jp.freq_shift_range);
      j.phase = rng.uniform_range(-jp.phase_range, jp.phase_range);
      jumps.push_back(j);
    }
  }
  return LightField(spec, grid, std::move(jumps));
}

/// Scale the field so its flux matches reference_flux.
inline LightField normalize_flux(const LightField& field, double reference_flux) {
  detail::require(reference_flux > 0.0, "normalize_flux: reference flux must be > 0");
  detail::require(field.flux() > 0.0, "normalize_flux: field has zero flux");
  LightField out = field;
  out.rescale(std::sqrt(reference_flux / field.flux()));
  return out;
}

}  // namespace wpdyn
