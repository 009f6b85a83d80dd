#pragma once

#include <span>
#include <vector>

#include "heitler/common.hpp"

namespace heitler {

// Sampled complex field envelope of the excitation laser in the frame rotating
// at the laser carrier, in units of Rabi frequency (rad/s). Positive envelope
// frequency means a component above the carrier: exp(-i 2 pi nu t).
class DriveWaveform {
 public:
  DriveWaveform() = default;
  // max_modulation_freq is the highest modulation frequency the constructor
  // of this waveform put into it; sample_rate must exceed twice that.
  DriveWaveform(std::vector<cplx> samples, double sample_rate, double carrier_detuning = 0.0,
                double max_modulation_freq = 0.0);

  static DriveWaveform constant(cplx rabi, double duration, double sample_rate,
                                double carrier_detuning = 0.0);

  std::span<const cplx> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double sample_rate() const { return sample_rate_; }
  double dt() const { return 1.0 / sample_rate_; }
  double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }
  double carrier_detuning() const { return carrier_detuning_; }
  double max_modulation_freq() const { return max_modulation_freq_; }
  double time(std::size_t i) const { return static_cast<double>(i) / sample_rate_; }

  // Linear interpolation between samples, last sample held to duration(),
  // zero outside [0, duration()).
  cplx at(double t) const;
  double max_abs() const;
  double mean_intensity() const;  // mean |samples|^2
  cplx mean() const;

  DriveWaveform slice(std::size_t first, std::size_t count) const;
  DriveWaveform scaled(cplx factor) const;

 private:
  std::vector<cplx> samples_;
  double sample_rate_ = 1.0;
  double carrier_detuning_ = 0.0;
  double max_modulation_freq_ = 0.0;
};

}  // namespace heitler
