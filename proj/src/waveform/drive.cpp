#include "heitler/waveform/drive.hpp"

#include <cmath>
#include <string>

namespace heitler {

DriveWaveform::DriveWaveform(std::vector<cplx> samples, double sample_rate,
                             double carrier_detuning, double max_modulation_freq)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      carrier_detuning_(carrier_detuning),
      max_modulation_freq_(max_modulation_freq) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw PreconditionError("drive waveform: sample_rate must be positive and finite");
  }
  if (!(sample_rate_ > 2.0 * max_modulation_freq_)) {
    throw PreconditionError("drive waveform: sample_rate " + std::to_string(sample_rate_) +
                            " Hz does not exceed twice the modulation frequency " +
                            std::to_string(max_modulation_freq_) + " Hz");
  }
  if (!std::isfinite(carrier_detuning_)) {
    throw PreconditionError("drive waveform: carrier detuning is not finite");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].real()) || !std::isfinite(samples_[i].imag())) {
      throw PreconditionError("drive waveform: non-finite sample at index " +
                              std::to_string(i));
    }
  }
}

DriveWaveform DriveWaveform::constant(cplx rabi, double duration, double sample_rate,
                                      double carrier_detuning) {
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  return DriveWaveform(std::vector<cplx>(n, rabi), sample_rate, carrier_detuning);
}

cplx DriveWaveform::at(double t) const {
  if (samples_.empty() || t < 0.0 || t >= duration()) return {0.0, 0.0};
  const double x = t * sample_rate_;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= samples_.size()) return samples_.back();
  const double frac = x - static_cast<double>(i);
  return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
}

double DriveWaveform::max_abs() const {
  double m = 0.0;
  for (const cplx& s : samples_) m = std::max(m, std::abs(s));
  return m;
}

double DriveWaveform::mean_intensity() const {
  if (samples_.empty()) return 0.0;
  double acc = 0.0;
  for (const cplx& s : samples_) acc += std::norm(s);
  return acc / static_cast<double>(samples_.size());
}

cplx DriveWaveform::mean() const {
  if (samples_.empty()) return {0.0, 0.0};
  cplx acc{0.0, 0.0};
  for (const cplx& s : samples_) acc += s;
  return acc / static_cast<double>(samples_.size());
}

DriveWaveform DriveWaveform::slice(std::size_t first, std::size_t count) const {
  if (first > samples_.size() || count > samples_.size() - first) {
    throw PreconditionError("drive waveform: slice out of range");
  }
  std::vector<cplx> out(samples_.begin() + static_cast<std::ptrdiff_t>(first),
                        samples_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return DriveWaveform(std::move(out), sample_rate_, carrier_detuning_, max_modulation_freq_);
}

DriveWaveform DriveWaveform::scaled(cplx factor) const {
  std::vector<cplx> out(samples_);
  for (cplx& s : out) s *= factor;
  return DriveWaveform(std::move(out), sample_rate_, carrier_detuning_, max_modulation_freq_);
}

}  // namespace heitler
