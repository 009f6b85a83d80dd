#pragma once

#include <vector>

#include "heitler/emitter/correlation.hpp"

namespace heitler {

// Power spectral density on a uniform grid of frequencies relative to the
// laser carrier, plus an optional delta line of weight elastic_weight at
// elastic_freq_hz.
struct Spectrum {
  std::vector<double> freq_hz;
  std::vector<double> power;  // per Hz
  double elastic_weight = 0.0;
  double elastic_freq_hz = 0.0;

  double bin_width() const;
  double continuum() const;  // sum(power) * bin_width
  double total() const { return continuum() + elastic_weight; }
  std::size_t peak_index() const;
};

// Spectrum of the scattered light from a first-order correlation sampled on
// a uniform grid starting at tau = 0 and reaching 20 / decay_rate. The
// plateau (mean of the last 10% of the grid) becomes the elastic weight and
// the remainder is Fourier transformed; the result is normalized so that
// total() = 1.
Spectrum emission_spectrum(const CorrelationFunction& g1);

// Convolution with a Lorentzian of the given FWHM, bin-integrated and
// normalized per column so total() is preserved. The elastic line is folded
// into the continuum.
Spectrum apply_instrument_response(const Spectrum& spectrum, double resolution_fwhm_hz);

}  // namespace heitler
