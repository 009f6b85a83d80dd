#pragma once

#include <span>
#include <vector>

#include "heitler/photon/detection.hpp"

namespace heitler {

// Start-multistop histogram of delays t_b - t_a. Bin k is centred at k w for
// k = -K..K with K = round(window / w).
struct CoincidenceHistogram {
  std::vector<double> tau;         // s, bin centres
  std::vector<double> counts;      // raw coincidences
  std::vector<double> normalized;  // counts / long-delay expectation
  double bin_width = 0.0;
  double expectation = 0.0;        // N_a N_b w / T, counts per bin for uncorrelated streams
  double duration = 0.0;           // T
  std::size_t n_a = 0, n_b = 0;

  std::size_t zero_bin() const { return tau.size() / 2; }
};

// duration <= 0 takes T from the span of both streams. With period > 0 the
// window must cover at least two periods on each side.
CoincidenceHistogram correlate_g2(std::span<const PhotonRecord> a,
                                  std::span<const PhotonRecord> b, double bin_width,
                                  double window, double duration = 0.0, double period = 0.0);

// Areas of the pulsed peaks: peak k collects the bins whose centres lie
// within half a period of k P. Uncertainties are Poissonian.
struct PeakAreas {
  double central = 0.0;
  double central_sigma = 0.0;
  std::vector<double> side;  // k = +-1 .. +-n_side, ordered -n..-1, 1..n
  double side_mean = 0.0;
  double side_mean_sigma = 0.0;
  double ratio = 0.0;        // central / side_mean
  double ratio_sigma = 0.0;
};
PeakAreas pulsed_peak_areas(const CoincidenceHistogram& h, double period, int n_side);

// Area of a single window [center - period/2, center + period/2) with its
// Poisson sigma.
struct Area {
  double value = 0.0;
  double sigma = 0.0;
};
Area window_area(const CoincidenceHistogram& h, double center, double period);

}  // namespace heitler
