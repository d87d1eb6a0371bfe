// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wpdyn/errors.hpp"
#include "wpdyn/fft_util.hpp"
#include "wpdyn/field.hpp"

namespace wpdyn {

/// One-sided power spectrum. Frequencies are angular (Hartree, hbar = 1);
/// power is in arbitrary units. Center and FWHM are derived from the stored
/// samples alone.
struct SpectralDensity {
  std::vector<double> frequencies;
  std::vector<double> power;
  double center = 0.0;  // power-weighted mean frequency
  double fwhm = 0.0;    // interpolated width at half of the peak power
};

namespace detail {

inline void fill_center_and_fwhm(SpectralDensity& s) {
  double pmax = 0.0;
  for (double p : s.power) pmax = std::max(pmax, p);
  if (pmax <= 0.0) {
    s.center = 0.0;
    s.fwhm = 0.0;
    return;
  }
  // Power-weighted mean of the spectral line. Bins below 1e-3 of the peak are
  // excluded: a signal with discontinuities carries a 1/w^2 background all
  // the way to the Nyquist frequency, and its first moment would otherwise
  // drag the center far off the line.
  const double floor_power = 1e-3 * pmax;
  double wsum = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.power.size(); ++i) {
    if (s.power[i] < floor_power) continue;
    sum += s.power[i];
    wsum += s.power[i] * s.frequencies[i];
  }
  s.center = sum > 0.0 ? wsum / sum : 0.0;
  const double half = 0.5 * pmax;
  // Outermost half-power crossings, linearly interpolated.
  std::size_t lo = 0;
  while (lo < s.power.size() && s.power[lo] < half) ++lo;
  std::size_t hi = s.power.size() - 1;
  while (hi > 0 && s.power[hi] < half) --hi;
  double f_lo = s.frequencies[lo];
  if (lo > 0) {
    double t = (half - s.power[lo - 1]) / (s.power[lo] - s.power[lo - 1]);
    f_lo = s.frequencies[lo - 1] + t * (s.frequencies[lo] - s.frequencies[lo - 1]);
  }
  double f_hi = s.frequencies[hi];
  if (hi + 1 < s.power.size()) {
    double t = (half - s.power[hi + 1]) / (s.power[hi] - s.power[hi + 1]);
    f_hi = s.frequencies[hi + 1] - t * (s.frequencies[hi + 1] - s.frequencies[hi]);
  }
  s.fwhm = f_hi - f_lo;
}

}  // namespace detail

/// Periodogram of a uniformly sampled real signal, zero-padded to at least
/// four times its length (next power of two), positive-frequency half only.
inline SpectralDensity spectrum_of_samples(std::span<const double> samples, double dt) {
  detail::require(samples.size() >= 2, "spectrum: need at least 2 samples");
  detail::require(dt > 0.0, "spectrum: dt must be > 0");

  std::size_t nfft = 1;
  while (nfft < 4 * samples.size()) nfft *= 2;

  detail::FftwBuffer<double> in(nfft);
  detail::FftwBuffer<fftw_complex> out(nfft / 2 + 1);
  for (std::size_t i = 0; i < nfft; ++i) in[i] = i < samples.size() ? samples[i] : 0.0;
  detail::FftwPlan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = detail::FftwPlan(
        fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(), out.data(), FFTW_ESTIMATE));
  }
  plan.execute();

  SpectralDensity s;
  const std::size_t nbins = nfft / 2 + 1;
  s.frequencies.resize(nbins);
  s.power.resize(nbins);
  const double dw = 2.0 * M_PI / (static_cast<double>(nfft) * dt);
  for (std::size_t k = 0; k < nbins; ++k) {
    s.frequencies[k] = dw * static_cast<double>(k);
    const double re = out[k][0] * dt;
    const double im = out[k][1] * dt;
    s.power[k] = re * re + im * im;
  }
  detail::fill_center_and_fwhm(s);
  return s;
}

inline SpectralDensity spectrum(const LightField& field) {
  return spectrum_of_samples(field.samples(), field.grid().dt());
}

/// Element-wise mean of single-realization periodograms (identical grids
/// required); center and FWHM are recomputed from the averaged power.
inline SpectralDensity average_spectra(std::span<const SpectralDensity> spectra) {
  detail::require(!spectra.empty(), "average_spectra: empty list");
  SpectralDensity mean;
  mean.frequencies = spectra.front().frequencies;
  mean.power.assign(mean.frequencies.size(), 0.0);
  for (const SpectralDensity& s : spectra) {
    detail::require(s.power.size() == mean.power.size(),
                    "average_spectra: mismatched frequency grids");
    for (std::size_t i = 0; i < s.power.size(); ++i) mean.power[i] += s.power[i];
  }
  const double inv = 1.0 / static_cast<double>(spectra.size());
  for (double& p : mean.power) p *= inv;
  detail::fill_center_and_fwhm(mean);
  return mean;
}

}  // namespace wpdyn
