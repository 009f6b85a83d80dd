#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace heitler {

struct HeterodyneConfig {
  double delta_nu = 210e3;  // Hz
  double lo_amplitude = 1.0;
  double signal_amplitude = 1.0;
  double sample_rate = 1e6;       // Hz
  double acquisition_time = 5.0;  // s
  double aom_freq_a = 80.000e6;   // Hz, metadata
  double aom_freq_b = 79.790e6;   // Hz, metadata
  std::size_t chunk_size = 1 << 16;  // samples per generation chunk

  void validate() const;
  std::size_t samples() const;
};

struct SinusoidalPhase {
  double freq = 0.0;       // Hz
  double amplitude = 0.0;  // rad
};

// Relative phase between signal and local oscillator: a Wiener process with
// variance random_walk_diffusion * t plus sinusoidal terms. Laser phase noise
// common to both fields (common_mode_diffusion) drops out of the beat.
struct PhaseNoiseModel {
  double random_walk_diffusion = 0.0;  // rad^2/s
  std::vector<SinusoidalPhase> sinusoidal;
  double common_mode_diffusion = 0.0;  // rad^2/s

  void validate() const;
};

// Balanced-detector difference current I1 - I2.
struct BeatTrace {
  std::vector<double> samples;
  double sample_rate = 1.0;
};

// Streams the trace chunk by chunk. The output does not depend on how the
// request is chunked: sample k always uses the k-th draws of the two phase
// walks.
class BeatGenerator {
 public:
  BeatGenerator(const HeterodyneConfig& config, const PhaseNoiseModel& noise, std::uint64_t seed);

  // Fills out with the next out.size() samples.
  void next(std::span<double> out);
  std::size_t position() const { return k_; }

 private:
  HeterodyneConfig cfg_;
  PhaseNoiseModel noise_;
  std::mt19937_64 rel_rng_, common_rng_;
  std::normal_distribution<double> rel_normal_, common_normal_;
  double rel_phase_ = 0.0, common_phase_ = 0.0;
  double rel_step_ = 0.0, common_step_ = 0.0;
  std::size_t k_ = 0;
};

BeatTrace beat_signal(const HeterodyneConfig& config, const PhaseNoiseModel& noise,
                      std::uint64_t seed);

}  // namespace heitler
