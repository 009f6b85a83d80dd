#include "heitler/emitter/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "ode.hpp"

namespace heitler {

using detail::Rho;

namespace {

Rho to_rho(const BlochState& s) {
  return {cplx(1.0 - s.rho_ee, 0.0), cplx(s.rho_ee, 0.0), s.rho_ge, std::conj(s.rho_ge)};
}

BlochState from_rho(const Rho& r) { return {r[1].real(), r[2]}; }

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw PreconditionError("time grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw PreconditionError("time grid has a non-finite entry");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw PreconditionError(fmt::format("time grid not strictly increasing at index {}", i));
    }
  }
}

}  // namespace

double max_grid_step(const EmitterParams& params, const DriveWaveform& drive) {
  return 1.0 / (20.0 * std::max(params.gamma(), drive.max_abs()));
}

BlochTrajectory solve_bloch(const EmitterParams& params, const DriveWaveform& drive,
                            std::span<const double> grid, const BlochState& initial,
                            SolverOptions options) {
  check_grid(grid);
  if (!initial.is_physical()) throw PreconditionError("initial Bloch state is not physical");
  const double span_end = drive.duration();
  if (grid.front() < 0.0 || grid.back() > span_end * (1.0 + 1e-12)) {
    throw PreconditionError(fmt::format(
        "time grid [{:.6g}, {:.6g}] s lies outside the drive span [0, {:.6g}] s", grid.front(),
        grid.back(), span_end));
  }
  const double step = max_grid_step(params, drive);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] - grid[i - 1] > step * (1.0 + 1e-9)) {
      throw PreconditionError(fmt::format(
          "time grid step {:.6g} s at index {} too coarse; required step <= {:.6g} s",
          grid[i] - grid[i - 1], i, step));
    }
  }

  const double gamma = params.gamma();
  const double gamma2 = params.coherence_decay();
  const double delta0 = params.detuning_offset() + drive.carrier_detuning();
  std::vector<double> wander;
  if (params.diffusion() && params.diffusion()->rms_detuning > 0.0) {
    wander = ou_detuning_path(*params.diffusion(), drive.size() + 1, drive.dt());
  }
  const double fs = drive.sample_rate();
  auto rhs = [&](double t, const Rho& r) {
    double delta = delta0;
    if (!wander.empty()) {
      const double x = std::min(t * fs, static_cast<double>(wander.size() - 1));
      const auto k = std::min(static_cast<std::size_t>(x), wander.size() - 2);
      const double f = x - static_cast<double>(k);
      delta += wander[k] + f * (wander[k + 1] - wander[k]);
    }
    return detail::bloch_rhs(gamma, gamma2, drive.at(t), delta, r);
  };

  detail::Dopri5 stepper({options.rtol, options.atol});
  BlochTrajectory out;
  out.t.assign(grid.begin(), grid.end());
  out.states.reserve(grid.size());
  Rho y = to_rho(initial);
  // The drive clock starts at t = 0 even when the grid starts later.
  double t = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double target = grid[i];
    // Stop at every drive sample so the stepper never straddles a kink of the
    // interpolated drive.
    while (t < target) {
      double next_sample = (std::floor(t * fs + 1e-9) + 1.0) / fs;
      if (next_sample <= t) next_sample = t + 1.0 / fs;
      const double stop = std::min(target, next_sample);
      stepper.advance(rhs, t, stop, y);
      t = stop;
    }
    out.states.push_back(from_rho(y));
  }
  return out;
}

BlochState steady_state(const EmitterParams& params, double rabi, double detuning) {
  if (!(rabi >= 0.0)) throw PreconditionError("steady_state: rabi must be >= 0");
  const double s = saturation_parameter(params, rabi, detuning);
  const double d = params.detuning_offset() + detuning;
  const double w = -1.0 / (1.0 + s);
  const cplx sigma = cplx(0.0, 0.5 * rabi * w) / cplx(params.coherence_decay(), -d);
  return {0.5 * s / (1.0 + s), sigma};
}

double coherent_fraction(const BlochState& state) {
  if (!(state.rho_ee > 0.0)) {
    throw PreconditionError("coherent_fraction: undefined for rho_ee = 0");
  }
  return std::clamp(std::norm(state.rho_ge) / state.rho_ee, 0.0, 1.0);
}

ScatteringTotals integrate_scattering(const EmitterParams& params, const BlochTrajectory& traj) {
  double pop = 0.0, coh = 0.0;
  for (std::size_t i = 1; i < traj.t.size(); ++i) {
    const double h = traj.t[i] - traj.t[i - 1];
    pop += 0.5 * h * (traj.states[i].rho_ee + traj.states[i - 1].rho_ee);
    coh += 0.5 * h * (std::norm(traj.states[i].rho_ge) + std::norm(traj.states[i - 1].rho_ge));
  }
  if (!(pop > 0.0)) throw PreconditionError("integrate_scattering: no excited population");
  return {coh / pop, params.gamma() * pop};
}

std::vector<double> linear_grid(double t0, double t1, std::size_t n) {
  if (n < 2) return std::vector<double>(n, t0);
  std::vector<double> g(n);
  const double h = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = t0 + h * static_cast<double>(i);
  g.back() = t1;
  return g;
}

std::vector<double> covering_grid(double duration, double max_step) {
  const auto steps = static_cast<std::size_t>(std::ceil(duration / max_step * (1.0 - 1e-12)));
  return linear_grid(0.0, duration, std::max<std::size_t>(steps, 1) + 1);
}

}  // namespace heitler
