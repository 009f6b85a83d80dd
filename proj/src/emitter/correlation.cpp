#include "heitler/emitter/correlation.hpp"

#include <cmath>

#include "heitler/emitter/bloch.hpp"
#include "ode.hpp"

namespace heitler {

using detail::Rho;

namespace {

void check_tau(std::span<const double> tau, double rabi) {
  if (tau.empty()) throw PreconditionError("correlation: tau grid is empty");
  if (!(tau.front() >= 0.0)) throw PreconditionError("correlation: tau grid starts below 0");
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) {
      throw PreconditionError("correlation: tau grid not strictly increasing");
    }
  }
  if (!(rabi > 0.0)) throw PreconditionError("correlation: rabi must be > 0 (no emission)");
}

// Evolves x under the constant-drive Liouvillian and samples component `pick`.
std::vector<cplx> evolve(const EmitterParams& params, double rabi, double detuning, Rho x,
                         std::span<const double> tau, int pick) {
  const double gamma = params.gamma();
  const double gamma2 = params.coherence_decay();
  const double delta = params.detuning_offset() + detuning;
  const cplx omega(rabi, 0.0);
  auto rhs = [&](double, const Rho& r) { return detail::bloch_rhs(gamma, gamma2, omega, delta, r); };
  detail::Dopri5 stepper({1e-10, 1e-13});
  std::vector<cplx> out;
  out.reserve(tau.size());
  double t = 0.0;
  for (double target : tau) {
    stepper.advance(rhs, t, target, x);
    t = target;
    out.push_back(x[pick]);
  }
  return out;
}

}  // namespace

std::vector<double> CorrelationFunction::real_values() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
  return out;
}

CorrelationFunction g2_qrt(const EmitterParams& params, double rabi, double detuning,
                           std::span<const double> tau_grid) {
  check_tau(tau_grid, rabi);
  const BlochState ss = steady_state(params, rabi, detuning);
  // sigma rho_ss sigma^+ / <sigma^+ sigma> is the ground state.
  const Rho ground{cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)};
  std::vector<cplx> v = evolve(params, rabi, detuning, ground, tau_grid, 1);
  for (cplx& x : v) x = cplx(std::max(0.0, x.real()) / ss.rho_ee, 0.0);
  return {std::vector<double>(tau_grid.begin(), tau_grid.end()), std::move(v),
          CorrelationKind::second_order, params.gamma()};
}

CorrelationFunction g1_qrt(const EmitterParams& params, double rabi, double detuning,
                           std::span<const double> tau_grid) {
  check_tau(tau_grid, rabi);
  const BlochState ss = steady_state(params, rabi, detuning);
  // rho_ss sigma^+: (gg, ee, eg, ge) = (rho_ge*, 0, rho_ee, 0) in terms of
  // <sigma> = rho_eg; Tr[sigma X] picks X_eg.
  const Rho x0{std::conj(ss.rho_ge), cplx(0.0, 0.0), cplx(ss.rho_ee, 0.0), cplx(0.0, 0.0)};
  std::vector<cplx> v = evolve(params, rabi, detuning, x0, tau_grid, 2);
  for (cplx& x : v) x /= ss.rho_ee;
  return {std::vector<double>(tau_grid.begin(), tau_grid.end()), std::move(v),
          CorrelationKind::first_order, params.gamma()};
}

}  // namespace heitler
