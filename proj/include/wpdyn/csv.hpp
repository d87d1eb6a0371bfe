// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <string>

#include "wpdyn/coherence.hpp"
#include "wpdyn/eigensolver.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/field.hpp"
#include "wpdyn/potentials.hpp"
#include "wpdyn/spectrum.hpp"
#include "wpdyn/units.hpp"

namespace wpdyn {

// CSV output is deliberately plain: one header line, comma-separated %.15g
// numbers, always the C locale. Identical inputs give identical bytes, which
// the determinism contract of the scenario runner relies on.

namespace detail {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) {
    f_ = std::fopen(path.string().c_str(), "wb");
    if (!f_) throw validation_error("cannot open output file " + path.string());
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void raw(const std::string& s) { std::fputs(s.c_str(), f_); }
  void number(double x) { std::fprintf(f_, "%.15g", x); }
  void sep() { std::fputc(',', f_); }
  void end_row() { std::fputc('\n', f_); }

 private:
  std::FILE* f_ = nullptr;
};

}  // namespace detail

inline void write_field_csv(const std::filesystem::path& path, const LightField& field) {
  detail::CsvFile f(path);
  f.raw("t_fs,E_au\n");
  for (std::int64_t k = 0; k < field.grid().n_samples(); ++k) {
    f.number(au_to_fs(field.grid().time(k)));
    f.sep();
    f.number(field.samples()[static_cast<std::size_t>(k)]);
    f.end_row();
  }
}

inline void write_jumps_csv(const std::filesystem::path& path, const LightField& field) {
  detail::CsvFile f(path);
  f.raw("t_fs,delta_omega_hartree,phi_rad\n");
  for (const FieldJump& j : field.jump_record()) {
    f.number(au_to_fs(j.time));
    f.sep();
    f.number(j.delta_omega);
    f.sep();
    f.number(j.phase);
    f.end_row();
  }
}

inline void write_spectrum_csv(const std::filesystem::path& path, const SpectralDensity& s) {
  detail::CsvFile f(path);
  f.raw("# center_hartree=" + std::to_string(s.center) + " fwhm_hartree=" + std::to_string(s.fwhm) +
        "\n");
  f.raw("omega_hartree,power\n");
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
    f.number(s.frequencies[k]);
    f.sep();
    f.number(s.power[k]);
    f.end_row();
  }
}

inline void write_pes_csv(const std::filesystem::path& path, const ChannelSpec& channel,
                          const RadialGrid& grid) {
  detail::CsvFile f(path);
  f.raw("R_bohr,V_hartree\n");
  for (int i = 0; i < grid.n_points(); ++i) {
    f.number(grid.point(i));
    f.sep();
    f.number(effective_potential(channel, grid.point(i)));
    f.end_row();
  }
}

inline void write_eigenstate_csv(const std::filesystem::path& path, const EigenState& state) {
  detail::CsvFile f(path);
  char head[96];
  std::snprintf(head, sizeof(head), "# v=%d energy_hartree=%.15g\n", state.v, state.energy);
  f.raw(head);
  f.raw("R_bohr,u_real\n");
  for (int i = 0; i < state.grid.n_points(); ++i) {
    f.number(state.grid.point(i));
    f.sep();
    f.number(state.u[static_cast<std::size_t>(i)]);
    f.end_row();
  }
}

inline void write_trace_csv(const std::filesystem::path& path, const CoherenceTrace& trace) {
  detail::CsvFile f(path);
  f.raw("t_fs,re_rho12,im_rho12,rho11,rho22,abs_C\n");
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    f.number(au_to_fs(trace.times[k]));
    f.sep();
    f.number(trace.rho12[k].real());
    f.sep();
    f.number(trace.rho12[k].imag());
    f.sep();
    f.number(trace.rho11[k]);
    f.sep();
    f.number(trace.rho22[k]);
    f.sep();
    f.number(std::abs(trace.c[k]));
    f.end_row();
  }
}

inline void write_ensemble_csv(const std::filesystem::path& path, const EnsembleResult& result) {
  detail::CsvFile f(path);
  f.raw("t_fs,re_rho12,im_rho12,rho11,rho22,abs_C_ens,mean_abs_C\n");
  const CoherenceTrace& e = result.ensemble;
  for (std::size_t k = 0; k < e.times.size(); ++k) {
    f.number(au_to_fs(e.times[k]));
    f.sep();
    f.number(e.rho12[k].real());
    f.sep();
    f.number(e.rho12[k].imag());
    f.sep();
    f.number(e.rho11[k]);
    f.sep();
    f.number(e.rho22[k]);
    f.sep();
    f.number(std::abs(e.c[k]));
    f.sep();
    f.number(result.mean_abs_c[k]);
    f.end_row();
  }
}

/// Rows are times, columns are radii; the first row carries the radial axis.
inline void write_density_csv(const std::filesystem::path& path, const DensityMatrix& d) {
  detail::CsvFile f(path);
  f.raw("t_fs\\R_bohr");
  for (double r : d.radii) {
    f.sep();
    f.number(r);
  }
  f.end_row();
  const std::size_t nr = d.radii.size();
  for (std::size_t row = 0; row < d.times.size(); ++row) {
    f.number(au_to_fs(d.times[row]));
    for (std::size_t i = 0; i < nr; ++i) {
      f.sep();
      f.number(d.values[row * nr + i]);
    }
    f.end_row();
  }
}

}  // namespace wpdyn
