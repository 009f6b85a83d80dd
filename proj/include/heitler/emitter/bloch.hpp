#pragma once

#include <span>
#include <vector>

#include "heitler/emitter/params.hpp"
#include "heitler/waveform/drive.hpp"

namespace heitler {

struct SolverOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
};

struct BlochTrajectory {
  std::vector<double> t;
  std::vector<BlochState> states;
};

// Largest grid step accepted by solve_bloch: 1 / (20 max(gamma, max |rabi|)).
double max_grid_step(const EmitterParams& params, const DriveWaveform& drive);

// Optical Bloch equations under a sampled drive (linear interpolation between
// samples, zero after the last sample). The grid must be strictly increasing,
// lie within [0, drive.duration()] and respect max_grid_step(). The laser
// detuning is params.detuning_offset() + drive.carrier_detuning(), plus the
// OU wander when params carries spectral diffusion.
BlochTrajectory solve_bloch(const EmitterParams& params, const DriveWaveform& drive,
                            std::span<const double> grid,
                            const BlochState& initial = BlochState::ground(),
                            SolverOptions options = {});

// Closed-form CW steady state.
BlochState steady_state(const EmitterParams& params, double rabi, double detuning = 0.0);

// |rho_ge|^2 / rho_ee, the elastic share of the scattered light.
double coherent_fraction(const BlochState& state);

// Time integrals over a trajectory (trapezoid rule): coherent fraction
// int |rho_ge|^2 / int rho_ee, and the mean photon number gamma int rho_ee.
struct ScatteringTotals {
  double coherent_fraction = 0.0;
  double emissions = 0.0;
};
ScatteringTotals integrate_scattering(const EmitterParams& params, const BlochTrajectory& traj);

// Evenly spaced grid of n points on [t0, t1].
std::vector<double> linear_grid(double t0, double t1, std::size_t n);

// Uniform grid on [0, duration] whose step does not exceed max_step.
std::vector<double> covering_grid(double duration, double max_step);

}  // namespace heitler
