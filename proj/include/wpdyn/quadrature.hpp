// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>

#include "wpdyn/grids.hpp"

namespace wpdyn {

// Trapezoidal quadrature on the radial grid is the one integration rule used
// throughout: eigenstate norms, flux, populations, and coherence overlaps all
// share it.

inline double trapezoid_norm_sq(const RadialGrid& grid, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) s += u[i] * u[i];
  s += 0.5 * (u.front() * u.front() + u.back() * u.back());
  return s * grid.dr();
}

inline double trapezoid_norm_sq(const RadialGrid& grid,
                                std::span<const std::complex<double>> u) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) s += std::norm(u[i]);
  s += 0.5 * (std::norm(u.front()) + std::norm(u.back()));
  return s * grid.dr();
}

/// Integral of conj(a) * b dR.
inline std::complex<double> trapezoid_overlap(const RadialGrid& grid,
                                              std::span<const std::complex<double>> a,
                                              std::span<const std::complex<double>> b) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) s += std::conj(a[i]) * b[i];
  s += 0.5 * (std::conj(a.front()) * b.front() + std::conj(a.back()) * b.back());
  return s * grid.dr();
}

}  // namespace wpdyn
