// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wpdyn/errors.hpp"
#include "wpdyn/grids.hpp"
#include "wpdyn/potentials.hpp"
#include "wpdyn/quadrature.hpp"

namespace wpdyn {

/// One bound ro-vibrational level. Amplitudes live on the full grid with the
/// Dirichlet endpoints stored as exact zeros, normalized under trapezoidal
/// quadrature, phase fixed so the outermost lobe is positive.
struct EigenState {
  int v = 0;
  double energy = 0.0;
  RadialGrid grid{0.1, 1.0, 2};
  std::vector<double> u;
};

struct BoundStatesResult {
  std::vector<EigenState> states;
  /// Non-empty when fewer bound levels exist than were requested.
  std::string diagnostic;
};

/// Eigenpairs of H = -(1/2mu) d^2/dR^2 + V(R) discretized with the
/// three-point stencil and u = 0 at both grid ends, for a potential sampled
/// on every grid point. States above V(r_max) are treated as continuum and
/// dropped; a bound state touching the grid edge rejects the grid.
inline BoundStatesResult bound_states_sampled(const RadialGrid& grid,
                                              std::span<const double> v_samples, double mu,
                                              int n_states) {
  const int m = grid.n_interior();
  detail::require(static_cast<int>(v_samples.size()) == grid.n_points(),
                  "bound_states: potential sample count does not match the grid");
  detail::require(n_states >= 1, "bound_states: n_states must be >= 1");
  detail::require(n_states <= m, "bound_states: more states requested than interior points");
  detail::require(mu > 0.0, "bound_states: reduced mass must be > 0");

  const double dr = grid.dr();
  const double kin = 1.0 / (2.0 * mu * dr * dr);
  std::vector<double> diag(static_cast<std::size_t>(m));
  std::vector<double> off(static_cast<std::size_t>(m > 1 ? m - 1 : 0), -kin);
  for (int j = 0; j < m; ++j) diag[static_cast<std::size_t>(j)] = 2.0 * kin + v_samples[static_cast<std::size_t>(j + 1)];

  std::vector<double> w(static_cast<std::size_t>(n_states));
  std::vector<double> z(static_cast<std::size_t>(m) * static_cast<std::size_t>(n_states));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n_states));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dstevr(LAPACK_ROW_MAJOR, 'V', 'I', m, diag.data(), off.data(), 0.0,
                                   0.0, 1, n_states, 0.0, &found, w.data(), z.data(), n_states,
                                   isuppz.data());
  if (info != 0) throw numerical_error("bound_states: dstevr failed with info=" + std::to_string(info));

  const double v_edge = v_samples.back();
  BoundStatesResult result;
  for (int k = 0; k < static_cast<int>(found); ++k) {
    if (w[static_cast<std::size_t>(k)] >= v_edge) break;  // continuum on this grid
    EigenState state;
    state.v = k;
    state.energy = w[static_cast<std::size_t>(k)];
    state.grid = grid;
    state.u.assign(static_cast<std::size_t>(grid.n_points()), 0.0);
    for (int j = 0; j < m; ++j) {
      state.u[static_cast<std::size_t>(j + 1)] = z[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_states) + static_cast<std::size_t>(k)];
    }

    double umax = 0.0;
    for (double x : state.u) umax = std::max(umax, std::abs(x));
    double leak = std::max(std::abs(state.u[1]), std::abs(state.u[state.u.size() - 2]));
    if (leak > 1e-6 * umax) {
      throw validation_error("bound_states: state v=" + std::to_string(k) +
                             " leaks into the grid boundary; enlarge the grid");
    }

    double norm = std::sqrt(trapezoid_norm_sq(grid, state.u));
    for (double& x : state.u) x /= norm;

    // Phase convention: outermost lobe positive. Walk in from the outer end
    // to the first local maximum of |u| above a noise floor.
    const double floor_amp = 1e-3 * umax / norm;
    int j = grid.n_points() - 2;
    while (j > 1 && std::abs(state.u[static_cast<std::size_t>(j)]) < floor_amp) --j;
    while (j > 1 && std::abs(state.u[static_cast<std::size_t>(j - 1)]) >
                        std::abs(state.u[static_cast<std::size_t>(j)]))
      --j;
    if (state.u[static_cast<std::size_t>(j)] < 0.0) {
      for (double& x : state.u) x = -x;
    }
    result.states.push_back(std::move(state));
  }

  if (static_cast<int>(result.states.size()) < n_states) {
    result.diagnostic = "potential supports only " + std::to_string(result.states.size()) +
                        " of " + std::to_string(n_states) +
                        " requested bound states below V(r_max)";
  }
  return result;
}

inline BoundStatesResult bound_states(const ChannelSpec& channel, const RadialGrid& grid,
                                      int n_states) {
  std::vector<double> v = sample_potential(channel, grid);
  return bound_states_sampled(grid, v, channel.mu, n_states);
}

}  // namespace wpdyn
