#pragma once

#include <string>
#include <vector>

#include "heitler/heterodyne/beat.hpp"

namespace heitler {

enum class Window { rectangular, hann };

Window window_from_name(const std::string& name);
const char* window_name(Window w);

// Mainlobe FWHM of the window's power response for a record of length T:
// 0.8859/T rectangular, 1.4406/T Hann.
double resolution_bandwidth(Window w, double acquisition_time);

// One-sided power spectral density (units^2/Hz). sum(power) * bin equals
// sum((x w)^2) / sum(w^2), the window-weighted mean square.
struct PowerSpectrum {
  std::vector<double> freq_hz;
  std::vector<double> power;
  double bin = 0.0;                 // grid spacing, Hz
  double resolution_bandwidth = 0.0;
  Window window = Window::rectangular;

  std::size_t peak_index() const;
};

PowerSpectrum power_spectrum(const BeatTrace& trace, Window window);

// Same normalization evaluated on a fine grid around f_center by direct
// DFT: bins of 1 / (oversample T) spanning f_center +- half_span.
PowerSpectrum zoom_spectrum(const BeatTrace& trace, Window window, double f_center,
                            double half_span, int oversample = 8);

}  // namespace heitler
