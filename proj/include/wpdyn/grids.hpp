// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "wpdyn/errors.hpp"
#include "wpdyn/units.hpp"

namespace wpdyn {

/// Uniform radial grid in Bohr, endpoints included. Immutable after
/// construction. r_min stays away from the origin so the 1/R^2 centrifugal
/// term is finite; the radial function u(R) is pinned to zero at both ends.
class RadialGrid {
 public:
  RadialGrid(double r_min, double r_max, int n_points)
      : r_min_(r_min), r_max_(r_max), n_(n_points) {
    detail::require(r_min > 0.0, "radial_grid.r_min_bohr: must be > 0");
    detail::require(r_max > r_min, "radial_grid.r_max_bohr: must exceed r_min");
    detail::require(n_points >= 2, "radial_grid.n_points: must be >= 2");
    dr_ = (r_max - r_min) / static_cast<double>(n_ - 1);
  }

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  int n_points() const { return n_; }
  double dr() const { return dr_; }
  double point(int i) const { return r_min_ + dr_ * static_cast<double>(i); }
  /// Number of interior points (Dirichlet endpoints excluded).
  int n_interior() const { return n_ - 2; }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.r_min_ == b.r_min_ && a.r_max_ == b.r_max_ && a.n_ == b.n_;
  }

 private:
  double r_min_;
  double r_max_;
  int n_;
  double dr_;
};

/// Uniform time grid in atomic units of time. Construct from femtoseconds at
/// the I/O boundary via from_fs(). The span must be an integer number of
/// steps to 1e-9 relative.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double dt)
      : t_start_(t_start), t_end_(t_end), dt_(dt) {
    detail::require(dt > 0.0, "time_grid.dt_fs: must be > 0");
    detail::require(t_end > t_start, "time_grid.t_end_fs: must exceed t_start");
    double span = t_end - t_start;
    double steps = span / dt;
    n_steps_ = static_cast<std::int64_t>(std::llround(steps));
    detail::require(n_steps_ >= 1 &&
                        std::abs(static_cast<double>(n_steps_) * dt - span) <= 1e-9 * span,
                    "time_grid: (t_end - t_start)/dt is not an integer step count");
  }

  static TimeGrid from_fs(double t_start_fs, double t_end_fs, double dt_fs) {
    return TimeGrid(fs_to_au(t_start_fs), fs_to_au(t_end_fs), fs_to_au(dt_fs));
  }

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double dt() const { return dt_; }
  std::int64_t n_steps() const { return n_steps_; }
  /// Sample count (one more than the step count).
  std::int64_t n_samples() const { return n_steps_ + 1; }
  double time(std::int64_t k) const { return t_start_ + dt_ * static_cast<double>(k); }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t_start_ == b.t_start_ && a.t_end_ == b.t_end_ && a.dt_ == b.dt_;
  }

 private:
  double t_start_;
  double t_end_;
  double dt_;
  std::int64_t n_steps_;
};

}  // namespace wpdyn
