#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "heitler/common.hpp"

namespace heitler {

// Ornstein-Uhlenbeck wandering of the transition frequency.
struct SpectralDiffusion {
  double rms_detuning = 0.0;      // rad/s
  double correlation_time = 1.0;  // s
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultTransitionFreq = 315315e9;  // Hz, 951 nm

// Two-level emitter. Rates are angular (rad/s). All dynamics are computed in
// the frame rotating at the laser carrier; transition_freq is metadata.
class EmitterParams {
 public:
  explicit EmitterParams(double gamma, double pure_dephasing = 0.0,
                         double detuning_offset = 0.0,
                         double transition_freq = kDefaultTransitionFreq,
                         std::optional<SpectralDiffusion> diffusion = std::nullopt);

  static EmitterParams from_lifetime(double t1_lifetime, double pure_dephasing = 0.0,
                                     double detuning_offset = 0.0);

  double gamma() const { return gamma_; }
  double t1_lifetime() const { return t1_; }
  double pure_dephasing() const { return pure_dephasing_; }
  // Static laser-transition detuning (laser minus transition), rad/s.
  double detuning_offset() const { return detuning_offset_; }
  double transition_freq() const { return transition_freq_; }
  const std::optional<SpectralDiffusion>& diffusion() const { return diffusion_; }

  // Decay rate of the optical coherence, gamma/2 + pure dephasing.
  double coherence_decay() const { return 0.5 * gamma_ + pure_dephasing_; }

  EmitterParams with_detuning(double detuning_offset) const;

 private:
  double gamma_;
  double t1_;
  double pure_dephasing_;
  double detuning_offset_;
  double transition_freq_;
  std::optional<SpectralDiffusion> diffusion_;
};

// Population and coherence of the two-level density matrix. rho_ge is the
// expectation value of the lowering operator, <sigma> = <e|rho|g>, whose
// square modulus is the elastically scattered intensity.
struct BlochState {
  double rho_ee = 0.0;
  cplx rho_ge{0.0, 0.0};

  static BlochState ground() { return {}; }
  static BlochState excited() { return {1.0, {0.0, 0.0}}; }
  bool is_physical(double tol = 1e-9) const;
};

// Saturation parameter s = |rabi|^2 gamma2 / (gamma (gamma2^2 + delta^2)),
// delta = params.detuning_offset() + detuning. Equals 2 rabi^2 / gamma^2 on
// resonance without pure dephasing.
double saturation_parameter(const EmitterParams& params, double rabi, double detuning = 0.0);

// Rabi frequency giving saturation s for the given detuning.
double rabi_for_saturation(const EmitterParams& params, double s, double detuning = 0.0);

// Exact discretization of the OU detuning process sampled every dt, starting
// from its stationary distribution.
std::vector<double> ou_detuning_path(const SpectralDiffusion& diffusion, std::size_t n,
                                     double dt);

}  // namespace heitler
