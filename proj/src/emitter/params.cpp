#include "heitler/emitter/params.hpp"

#include <cmath>
#include <random>
#include <string>

namespace heitler {

EmitterParams::EmitterParams(double gamma, double pure_dephasing, double detuning_offset,
                             double transition_freq, std::optional<SpectralDiffusion> diffusion)
    : gamma_(gamma),
      t1_(1.0 / gamma),
      pure_dephasing_(pure_dephasing),
      detuning_offset_(detuning_offset),
      transition_freq_(transition_freq),
      diffusion_(diffusion) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw PreconditionError("emitter: gamma must be positive and finite");
  }
  if (!(pure_dephasing_ >= 0.0) || !std::isfinite(pure_dephasing_)) {
    throw PreconditionError("emitter: pure_dephasing must be >= 0");
  }
  if (!std::isfinite(detuning_offset_)) {
    throw PreconditionError("emitter: detuning_offset is not finite");
  }
  if (diffusion_) {
    if (!(diffusion_->rms_detuning >= 0.0)) {
      throw PreconditionError("emitter: spectral diffusion rms_detuning must be >= 0");
    }
    if (!(diffusion_->correlation_time > 0.0)) {
      throw PreconditionError("emitter: spectral diffusion correlation_time must be > 0");
    }
  }
}

EmitterParams EmitterParams::from_lifetime(double t1_lifetime, double pure_dephasing,
                                           double detuning_offset) {
  if (!(t1_lifetime > 0.0)) throw PreconditionError("emitter: lifetime must be positive");
  EmitterParams p(1.0 / t1_lifetime, pure_dephasing, detuning_offset);
  p.t1_ = t1_lifetime;
  return p;
}

EmitterParams EmitterParams::with_detuning(double detuning_offset) const {
  EmitterParams p = *this;
  p.detuning_offset_ = detuning_offset;
  return p;
}

bool BlochState::is_physical(double tol) const {
  if (!std::isfinite(rho_ee) || !std::isfinite(rho_ge.real()) || !std::isfinite(rho_ge.imag())) {
    return false;
  }
  if (rho_ee < -tol || rho_ee > 1.0 + tol) return false;
  return std::norm(rho_ge) <= rho_ee * (1.0 - rho_ee) + tol;
}

double saturation_parameter(const EmitterParams& params, double rabi, double detuning) {
  const double g2 = params.coherence_decay();
  const double d = params.detuning_offset() + detuning;
  return rabi * rabi * g2 / (params.gamma() * (g2 * g2 + d * d));
}

double rabi_for_saturation(const EmitterParams& params, double s, double detuning) {
  if (!(s >= 0.0)) throw PreconditionError("saturation parameter must be >= 0");
  const double g2 = params.coherence_decay();
  const double d = params.detuning_offset() + detuning;
  return std::sqrt(s * params.gamma() * (g2 * g2 + d * d) / g2);
}

std::vector<double> ou_detuning_path(const SpectralDiffusion& diffusion, std::size_t n,
                                     double dt) {
  std::vector<double> path(n, 0.0);
  if (n == 0 || diffusion.rms_detuning == 0.0) return path;
  std::mt19937_64 rng(diffusion.seed);
  std::normal_distribution<double> normal;
  const double a = std::exp(-dt / diffusion.correlation_time);
  const double b = diffusion.rms_detuning * std::sqrt(1.0 - a * a);
  path[0] = diffusion.rms_detuning * normal(rng);
  for (std::size_t i = 1; i < n; ++i) path[i] = a * path[i - 1] + b * normal(rng);
  return path;
}

}  // namespace heitler
