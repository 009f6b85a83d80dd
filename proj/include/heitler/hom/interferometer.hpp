#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heitler/emitter/correlation.hpp"
#include "heitler/photon/correlate.hpp"
#include "heitler/photon/detection.hpp"

namespace heitler {

// Unbalanced Mach-Zehnder: BS1 (t1 short arm, r1 long arm), a delay line in
// the long arm, BS2 (t2, r2) onto detectors c and d. Coefficients are
// intensity splits.
struct InterferometerConfig {
  double t1 = 0.5, r1 = 0.5;
  double t2 = 0.5, r2 = 0.5;
  double delay = 3.33e-9;  // s
  double pol_overlap_parallel = 1.0;
  double pol_overlap_orthogonal = 0.0;
  double mode_overlap = 1.0;  // |temporal overlap|^2

  void validate() const;

  // t1 / r1 = ratio with t1 + r1 = 1.
  static InterferometerConfig from_ratio(double t1_over_r1, double t2, double delay,
                                         double p_pa, double p_or);
};

enum class Polarization { parallel, orthogonal };
Polarization polarization_from_name(const std::string& name);
const char* polarization_name(Polarization p);

// eta = pol_overlap * mode_overlap for the chosen half-wave plate setting.
double indistinguishability(const InterferometerConfig& config, Polarization pol);

// (t1^2 + r1^2) g2 + 2 r1 t1 (1 - eta + eta g2), pointwise.
CorrelationFunction hom_model(const CorrelationFunction& g2, double t1, double r1, double eta);

struct HomDetection {
  double period = 1.0 / 300e6;  // pulse period, s
  double jitter_fwhm = 600e-12;
  double bin_width = 162e-12;
  double window = 5.0 / 300e6;  // histogram half range, s
  double duration = 0.0;        // stream length, s; must exceed 100 delays

  void validate(const InterferometerConfig& config) const;
};

// Routes every record through the interferometer. A pulse slot at BS2 that
// receives exactly one photon per input port interferes with probability
// eta: the pair leaves through separate ports with (t2 - r2)^2, otherwise
// both take c or d. All other photons split independently. Detected times
// get Gaussian jitter and the c/d cross-correlation is returned.
CoincidenceHistogram simulate_hom(std::span<const PhotonRecord> records,
                                  const InterferometerConfig& config, Polarization pol,
                                  std::uint64_t seed, const HomDetection& detection);

// g_hom / g2 - 1 per bin, NaN where g2 is below 5% of its long-delay mean.
// sigma is the Poisson uncertainty of each unmasked bin.
struct DifferenceCurve {
  std::vector<double> tau;
  std::vector<double> value;
  std::vector<double> sigma;
  std::vector<bool> masked;
};
DifferenceCurve normalized_difference(const CoincidenceHistogram& g_hom,
                                      const CoincidenceHistogram& g2);

// Sum of the unmasked bins within one period centred at zero delay.
Area difference_area(const DifferenceCurve& curve, double period);

// Normalized histogram area of one period centred at zero delay.
Area central_area(const CoincidenceHistogram& h, double period);

struct Contrast {
  double value = 0.0;
  double sigma = 0.0;
};
Contrast contrast(const Area& a_parallel, const Area& a_orthogonal);

enum class CorrectionMode { polarization_only, full };

struct CorrectedContrast {
  double value = 0.0;
  double sigma = 0.0;
  double polarization_factor = 1.0;  // 1 / p_pa
  double beamsplitter_factor = 1.0;  // (t1^2 + r1^2) / (2 t1 r1), full mode only
  bool approximate = false;          // unequal-arm coherence not modelled
};
CorrectedContrast corrected_contrast(const Contrast& raw, double p_pa, double p_or, double t1,
                                     double r1, double t2, double r2, CorrectionMode mode,
                                     double p_pa_sigma = 0.0);

}  // namespace heitler
