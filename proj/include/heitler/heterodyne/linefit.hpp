#pragma once

#include <cstdint>

#include "heitler/heterodyne/beat.hpp"
#include "heitler/heterodyne/spectrum.hpp"

namespace heitler {

// Gaussian plus flat background fitted by Levenberg-Marquardt over
// +-10 resolution bandwidths around the highest point near `around`.
// Uncertainties come from s^2 (J^T J)^-1 at the optimum.
struct LineFit {
  double fwhm = 0.0;
  double fwhm_sigma = 0.0;
  double center = 0.0;
  double center_sigma = 0.0;
  double amplitude = 0.0;
  double background = 0.0;
  std::size_t points = 0;
};
LineFit fit_gaussian_line(const PowerSpectrum& spectrum, double around);

struct MutualCoherence {
  double tau_c = 0.0;   // s
  double length = 0.0;  // m
};
// tau_c = sqrt(2 ln 2 / pi) / fwhm, length = c tau_c.
MutualCoherence mutual_coherence(double fwhm);

// Beat, zoomed spectrum around delta_nu and Gaussian fit in one go.
struct HeterodyneAnalysis {
  PowerSpectrum spectrum;  // zoomed
  LineFit fit;
  MutualCoherence coherence;
};
HeterodyneAnalysis analyze_beat(const BeatTrace& trace, const HeterodyneConfig& config,
                                Window window);

// Random-walk diffusion (rad^2/s) whose fitted FWHM for this configuration
// and seed equals target_fwhm, by bisection in log D.
struct DiffusionCalibration {
  double diffusion = 0.0;
  double fwhm = 0.0;
  int iterations = 0;
};
DiffusionCalibration calibrate_diffusion(const HeterodyneConfig& config,
                                         const PhaseNoiseModel& base, double target_fwhm,
                                         std::uint64_t seed, Window window = Window::rectangular,
                                         double tolerance = 1e-3);

}  // namespace heitler
