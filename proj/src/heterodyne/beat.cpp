#include "heitler/heterodyne/beat.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "heitler/common.hpp"

namespace heitler {

void HeterodyneConfig::validate() const {
  if (!(sample_rate > 0.0)) throw PreconditionError("heterodyne: sample_rate must be > 0");
  if (!(delta_nu > 0.0 && delta_nu < 0.5 * sample_rate)) {
    throw PreconditionError(fmt::format(
        "heterodyne: beat frequency {:.6g} Hz violates Nyquist at sample rate {:.6g} Hz",
        delta_nu, sample_rate));
  }
  if (!(acquisition_time > 0.0)) throw PreconditionError("heterodyne: acquisition_time must be > 0");
  if (!(lo_amplitude >= 0.0) || !(signal_amplitude >= 0.0)) {
    throw PreconditionError("heterodyne: field amplitudes must be >= 0");
  }
  if (chunk_size == 0) throw PreconditionError("heterodyne: chunk_size must be > 0");
}

std::size_t HeterodyneConfig::samples() const {
  return static_cast<std::size_t>(std::llround(acquisition_time * sample_rate));
}

void PhaseNoiseModel::validate() const {
  if (!(random_walk_diffusion >= 0.0) || !(common_mode_diffusion >= 0.0)) {
    throw PreconditionError("phase noise: diffusion must be >= 0");
  }
  for (const SinusoidalPhase& s : sinusoidal) {
    if (!(s.freq > 0.0)) throw PreconditionError("phase noise: sinusoid frequency must be > 0");
  }
}

BeatGenerator::BeatGenerator(const HeterodyneConfig& config, const PhaseNoiseModel& noise,
                             std::uint64_t seed)
    : cfg_(config), noise_(noise), rel_rng_(seed), common_rng_(seed ^ 0x5bd1e9955bd1e995ULL) {
  cfg_.validate();
  noise_.validate();
  const double dt = 1.0 / cfg_.sample_rate;
  rel_step_ = std::sqrt(noise_.random_walk_diffusion * dt);
  common_step_ = std::sqrt(noise_.common_mode_diffusion * dt);
}

void BeatGenerator::next(std::span<double> out) {
  const double fs = cfg_.sample_rate;
  const double es = cfg_.signal_amplitude, elo = cfg_.lo_amplitude;
  const double r = 1.0 / std::sqrt(2.0);
  for (double& v : out) {
    const double t = static_cast<double>(k_) / fs;
    const double cycles = cfg_.delta_nu * static_cast<double>(k_) / fs;
    double rel = kTwoPi * (cycles - std::floor(cycles)) + rel_phase_;
    for (const SinusoidalPhase& s : noise_.sinusoidal) {
      rel += s.amplitude * std::sin(kTwoPi * s.freq * t);
    }
    // Complex fields at the balanced beamsplitter; the laser phase rides on
    // both.
    const cplx e_sig = es * std::polar(1.0, common_phase_ + rel);
    const cplx e_lo = elo * std::polar(1.0, common_phase_);
    const double i1 = std::norm(r * (e_sig + e_lo));
    const double i2 = std::norm(r * (e_sig - e_lo));
    v = i1 - i2;
    if (rel_step_ > 0.0) rel_phase_ += rel_step_ * rel_normal_(rel_rng_);
    if (common_step_ > 0.0) common_phase_ += common_step_ * common_normal_(common_rng_);
    ++k_;
  }
}

BeatTrace beat_signal(const HeterodyneConfig& config, const PhaseNoiseModel& noise,
                      std::uint64_t seed) {
  BeatGenerator gen(config, noise, seed);
  BeatTrace out;
  out.sample_rate = config.sample_rate;
  out.samples.resize(config.samples());
  std::span<double> all(out.samples);
  for (std::size_t start = 0; start < all.size(); start += config.chunk_size) {
    gen.next(all.subspan(start, std::min(config.chunk_size, all.size() - start)));
  }
  return out;
}

}  // namespace heitler
