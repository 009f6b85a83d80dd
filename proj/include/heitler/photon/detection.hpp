#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace heitler {

struct PhotonRecord {
  std::int64_t timestamp_ps = 0;
  std::uint8_t channel = 0;

  friend bool operator==(const PhotonRecord&, const PhotonRecord&) = default;
};

// One detector channel, timestamps non-decreasing.
using PhotonStream = std::vector<PhotonRecord>;

struct DetectionChain {
  double efficiency = 1.0;
  double background_rate = 0.0;  // counts/s
  double jitter_fwhm = 0.0;      // s
  double bin_width = 162e-12;    // s
  double sideband_loss = 0.0;    // fraction of emission outside the detection band

  void validate() const;
};

// Thinning by efficiency (1 - sideband_loss), Gaussian jitter, Poisson
// background over [0, duration), quantization to 1 ps. Negative timestamps
// are dropped and the output is sorted.
PhotonStream apply_detection(std::span<const double> emissions, const DetectionChain& chain,
                             std::uint64_t seed, double duration, std::uint8_t channel = 0);

// Random 50:50 split onto channels 0 and 1 (Hanbury Brown-Twiss).
std::pair<PhotonStream, PhotonStream> hbt_split(std::span<const PhotonRecord> stream,
                                                std::uint64_t seed);

}  // namespace heitler
