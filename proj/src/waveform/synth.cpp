#include "heitler/waveform/synth.hpp"

#include <cmath>
#include <fmt/format.h>

namespace heitler {

namespace {

void check_nyquist(double mod_freq, double sample_rate) {
  if (!(mod_freq > 0.0)) throw PreconditionError("modulation frequency must be > 0");
  if (!(mod_freq < 0.5 * sample_rate)) {
    throw PreconditionError(fmt::format(
        "modulation frequency {:.6g} Hz violates Nyquist at sample rate {:.6g} Hz", mod_freq,
        sample_rate));
  }
}

std::size_t whole_period_samples(double mod_freq, double duration, double sample_rate) {
  const double periods = std::max(1.0, std::round(duration * mod_freq));
  return static_cast<std::size_t>(std::llround(periods * sample_rate / mod_freq));
}

}  // namespace

void ModulationSpec::validate() const {
  if (!(depth >= 0.0 && depth <= 1.0)) {
    throw PreconditionError(fmt::format("modulation depth {} outside [0, 1]", depth));
  }
  if (kind == ModulationKind::pulse_train) {
    if (!(pulse_width > 0.0) || !(rep_rate > 0.0)) {
      throw PreconditionError("pulse train needs positive pulse_width and rep_rate");
    }
    if (!(pulse_width * rep_rate < 1.0)) {
      throw PreconditionError(fmt::format(
          "pulse width {:.6g} s overlaps the next pulse at rep rate {:.6g} Hz", pulse_width,
          rep_rate));
    }
  }
}

DriveWaveform sine_am(double mod_freq, double depth, double mean_rabi, double duration,
                      double sample_rate) {
  check_nyquist(mod_freq, sample_rate);
  if (!(depth >= 0.0 && depth <= 1.0)) {
    throw PreconditionError(fmt::format("modulation depth {} outside [0, 1]", depth));
  }
  const std::size_t n = whole_period_samples(mod_freq, duration, sample_rate);
  std::vector<cplx> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double intensity = 1.0 + depth * std::cos(kTwoPi * mod_freq * t);
    s[i] = mean_rabi * std::sqrt(std::max(0.0, intensity));
  }
  return DriveWaveform(std::move(s), sample_rate, 0.0, mod_freq);
}

DriveWaveform carrier_suppressed(double mod_freq, double duration, double sample_rate,
                                 double peak_rabi) {
  check_nyquist(mod_freq, sample_rate);
  const std::size_t n = whole_period_samples(mod_freq, duration, sample_rate);
  std::vector<cplx> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    s[i] = peak_rabi * std::cos(kTwoPi * mod_freq * t);
  }
  return DriveWaveform(std::move(s), sample_rate, 0.0, mod_freq);
}

DriveWaveform pulse_train(double pulse_width, double rep_rate, double peak_rabi,
                          std::size_t n_pulses, double sample_rate, double edge_time) {
  ModulationSpec spec;
  spec.kind = ModulationKind::pulse_train;
  spec.pulse_width = pulse_width;
  spec.rep_rate = rep_rate;
  spec.validate();
  if (n_pulses == 0) throw PreconditionError("pulse train needs at least one pulse");
  if (!(edge_time >= 0.0) || 2.0 * edge_time > pulse_width) {
    throw PreconditionError("pulse edge_time must lie in [0, pulse_width / 2]");
  }
  const std::size_t n =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_pulses) * sample_rate / rep_rate));
  const auto width = static_cast<std::size_t>(std::llround(pulse_width * sample_rate));
  const double edge = edge_time * sample_rate;
  std::vector<cplx> s(n, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n_pulses; ++k) {
    const auto start = static_cast<std::size_t>(
        std::ceil(static_cast<double>(k) * sample_rate / rep_rate - 1e-9));
    for (std::size_t j = 0; j < width && start + j < n; ++j) {
      double a = 1.0;
      if (edge > 0.0) {
        const double x = static_cast<double>(j) + 0.5;
        const double from_end = static_cast<double>(width) - x;
        const double r = std::min(x, from_end) / edge;
        // Raised-cosine intensity ramp.
        if (r < 1.0) a = std::sqrt(0.5 * (1.0 - std::cos(std::numbers::pi * r)));
      }
      s[start + j] = peak_rabi * a;
    }
  }
  return DriveWaveform(std::move(s), sample_rate, 0.0, rep_rate);
}

}  // namespace heitler
