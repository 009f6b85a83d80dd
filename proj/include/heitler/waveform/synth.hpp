#pragma once

#include <cstddef>

#include "heitler/waveform/drive.hpp"

namespace heitler {

inline constexpr double kDefaultSampleRate = 20e9;  // Hz

enum class ModulationKind { sine_am, carrier_suppressed, pulse_train, custom };

struct ModulationSpec {
  ModulationKind kind = ModulationKind::sine_am;
  double mod_freq = 0.0;     // Hz
  double depth = 0.0;        // [0, 1]
  double pulse_width = 0.0;  // s
  double rep_rate = 0.0;     // Hz
  double edge_time = 0.0;    // s, raised-cosine edges for pulse_train

  void validate() const;
};

// Intensity modulation: |E|^2 = mean_rabi^2 (1 + depth cos(2 pi mod_freq t)).
// The duration is rounded to whole modulation periods.
DriveWaveform sine_am(double mod_freq, double depth, double mean_rabi, double duration,
                      double sample_rate = kDefaultSampleRate);

// Bipolar field peak_rabi cos(2 pi mod_freq t): zero mean, no carrier. The
// duration is rounded to whole modulation periods.
DriveWaveform carrier_suppressed(double mod_freq, double duration,
                                 double sample_rate = kDefaultSampleRate,
                                 double peak_rabi = 1.0);

// n_pulses rectangular intensity pulses with rising edges every 1/rep_rate.
// edge_time > 0 replaces the one-sample edges with raised-cosine ramps of
// that length inside the pulse.
DriveWaveform pulse_train(double pulse_width, double rep_rate, double peak_rabi,
                          std::size_t n_pulses, double sample_rate = kDefaultSampleRate,
                          double edge_time = 0.0);

}  // namespace heitler
