#include "heitler/photon/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>

#include "heitler/common.hpp"

namespace heitler {

void DetectionChain::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw PreconditionError(fmt::format("detection efficiency {} outside [0, 1]", efficiency));
  }
  if (!(sideband_loss >= 0.0 && sideband_loss <= 1.0)) {
    throw PreconditionError(fmt::format("sideband_loss {} outside [0, 1]", sideband_loss));
  }
  if (!(jitter_fwhm >= 0.0)) throw PreconditionError("jitter_fwhm must be >= 0");
  if (!(background_rate >= 0.0)) throw PreconditionError("background_rate must be >= 0");
  if (!(bin_width > 0.0)) throw PreconditionError("bin_width must be > 0");
}

PhotonStream apply_detection(std::span<const double> emissions, const DetectionChain& chain,
                             std::uint64_t seed, double duration, std::uint8_t channel) {
  chain.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, chain.jitter_fwhm / kFwhmPerSigma);
  const double keep = chain.efficiency * (1.0 - chain.sideband_loss);
  PhotonStream out;
  out.reserve(static_cast<std::size_t>(static_cast<double>(emissions.size()) * keep * 1.01) + 16);
  auto push = [&](double t) {
    const auto ps = static_cast<std::int64_t>(std::llround(t * 1e12));
    if (ps >= 0) out.push_back({ps, channel});
  };
  for (double t : emissions) {
    if (uni(rng) >= keep) continue;
    push(chain.jitter_fwhm > 0.0 ? t + normal(rng) : t);
  }
  if (chain.background_rate > 0.0 && duration > 0.0) {
    std::exponential_distribution<double> gap(chain.background_rate);
    for (double t = gap(rng); t < duration; t += gap(rng)) push(t);
  }
  std::stable_sort(out.begin(), out.end(), [](const PhotonRecord& a, const PhotonRecord& b) {
    return a.timestamp_ps < b.timestamp_ps;
  });
  return out;
}

std::pair<PhotonStream, PhotonStream> hbt_split(std::span<const PhotonRecord> stream,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::pair<PhotonStream, PhotonStream> out;
  out.first.reserve(stream.size() / 2 + 16);
  out.second.reserve(stream.size() / 2 + 16);
  for (const PhotonRecord& r : stream) {
    if (rng() >> 63) out.second.push_back({r.timestamp_ps, 1});
    else out.first.push_back({r.timestamp_ps, 0});
  }
  return out;
}

}  // namespace heitler
