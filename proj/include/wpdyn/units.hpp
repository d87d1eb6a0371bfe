// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "wpdyn/errors.hpp"

namespace wpdyn {

// Everything internal runs in Hartree atomic units: energy in Hartree, length
// in Bohr, hbar = 1. Femtoseconds and nanometers appear only at the I/O
// boundary (configs, CSV columns).
namespace constants {

/// 1 a.u. of time expressed in femtoseconds.
inline constexpr double fs_per_au_time = 0.02418884254;

/// 1 Hartree expressed in electron volts.
inline constexpr double ev_per_hartree = 27.211386245988;

/// h*c expressed in Hartree * nm; a photon of wavelength L nm carries
/// hc_hartree_nm / L Hartree.
inline constexpr double hc_hartree_nm = 45.56335252912015;

}  // namespace constants

inline double fs_to_au(double t_fs) { return t_fs / constants::fs_per_au_time; }
inline double au_to_fs(double t_au) { return t_au * constants::fs_per_au_time; }

enum class Unit {
  hartree,
  electron_volt,
  nanometer_photon,  // photon wavelength, reciprocal to energy
  femtosecond,
  atomic_time,
  bohr,
};

inline std::string unit_name(Unit u) {
  switch (u) {
    case Unit::hartree: return "hartree";
    case Unit::electron_volt: return "eV";
    case Unit::nanometer_photon: return "nm(photon)";
    case Unit::femtosecond: return "fs";
    case Unit::atomic_time: return "a.u. time";
    case Unit::bohr: return "bohr";
  }
  return "?";
}

/// Convert between the supported units. Energy units and the photon
/// wavelength are mutually convertible (nm is reciprocal), as are the two
/// time units. Unsupported pairs are rejected.
inline double convert(double value, Unit from, Unit to) {
  if (from == to) return value;

  auto is_energy = [](Unit u) {
    return u == Unit::hartree || u == Unit::electron_volt || u == Unit::nanometer_photon;
  };
  auto is_time = [](Unit u) { return u == Unit::femtosecond || u == Unit::atomic_time; };

  if (is_energy(from) && is_energy(to)) {
    double hartree = value;
    if (from == Unit::electron_volt) hartree = value / constants::ev_per_hartree;
    if (from == Unit::nanometer_photon) {
      detail::require(value != 0.0, "convert: zero wavelength");
      hartree = constants::hc_hartree_nm / value;
    }
    if (to == Unit::hartree) return hartree;
    if (to == Unit::electron_volt) return hartree * constants::ev_per_hartree;
    detail::require(hartree != 0.0, "convert: zero photon energy");
    return constants::hc_hartree_nm / hartree;
  }
  if (is_time(from) && is_time(to)) {
    return from == Unit::femtosecond ? fs_to_au(value) : au_to_fs(value);
  }
  throw validation_error("convert: unsupported unit pair " + unit_name(from) + " -> " +
                         unit_name(to));
}

}  // namespace wpdyn
