// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "wpdyn/errors.hpp"
#include "wpdyn/grids.hpp"

namespace wpdyn {

/// W(R) = W0 exp(-(R-R0)/a) + Winf. Strictly decreasing for W0 > 0.
struct RepulsiveExpPes {
  double w0 = 0.1;
  double r0 = 3.3;
  double a = 1.0;
  double w_inf = 0.0;
};

/// W(R) = W0 [1 - exp(-(R-R0)/a)]^2 + Winf. Minimum Winf at R = R0,
/// dissociation limit W0 + Winf.
struct MorsePes {
  double w0 = 0.1;
  double r0 = 5.0;
  double a = 2.5;
  double w_inf = 0.0;
};

using PesSpec = std::variant<RepulsiveExpPes, MorsePes>;

inline double eval_pes(const PesSpec& spec, double r) {
  return std::visit(
      [r](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RepulsiveExpPes>) {
          return p.w0 * std::exp(-(r - p.r0) / p.a) + p.w_inf;
        } else {
          double e = 1.0 - std::exp(-(r - p.r0) / p.a);
          return p.w0 * e * e + p.w_inf;
        }
      },
      spec);
}

/// One electronic surface plus the rotational channel that lives on it.
struct ChannelSpec {
  PesSpec pes;
  int j = 0;           // angular momentum quantum number
  double mu = 918.0;   // reduced mass, a.u.
};

/// V^J(R) = J(J+1)/(2 mu R^2) + W(R).
inline double effective_potential(const ChannelSpec& channel, double r) {
  detail::require(r > 0.0, "effective_potential: R must be > 0");
  double jj = static_cast<double>(channel.j) * static_cast<double>(channel.j + 1);
  return jj / (2.0 * channel.mu * r * r) + eval_pes(channel.pes, r);
}

/// Transition dipole, linear through the origin: |D(R)| = slope * R.
struct DipoleSpec {
  double slope = 0.5;  // a.u. per Bohr
};

inline double eval_dipole(const DipoleSpec& spec, double r) { return spec.slope * r; }

/// Sample V^J on every grid point (endpoints included).
inline std::vector<double> sample_potential(const ChannelSpec& channel, const RadialGrid& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.n_points()));
  for (int i = 0; i < grid.n_points(); ++i) {
    v[static_cast<std::size_t>(i)] = effective_potential(channel, grid.point(i));
  }
  return v;
}

inline void validate_pes(const PesSpec& spec, const std::string& key,
                         std::vector<std::string>& diagnostics) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if (!(p.a > 0.0)) diagnostics.push_back(key + ".a_bohr: must be > 0");
        if constexpr (std::is_same_v<T, MorsePes>) {
          if (!(p.w0 > 0.0)) diagnostics.push_back(key + ".w0_hartree: must be > 0 for morse");
        } else {
          if (!(p.w0 >= 0.0)) diagnostics.push_back(key + ".w0_hartree: must be >= 0");
        }
      },
      spec);
}

inline void validate_channel(const ChannelSpec& channel, const std::string& key,
                             std::vector<std::string>& diagnostics) {
  validate_pes(channel.pes, key + ".pes", diagnostics);
  if (!(channel.mu > 0.0)) diagnostics.push_back(key + ".mass_au: must be > 0");
  if (channel.j < 0) diagnostics.push_back(key + ".j: must be >= 0");
}

}  // namespace wpdyn
