#pragma once

#include <cstdint>
#include <vector>

#include "heitler/emitter/params.hpp"
#include "heitler/simd/kernels.hpp"
#include "heitler/waveform/drive.hpp"

namespace heitler {

// Monte Carlo wave-function unraveling, jump/no-jump with norm thresholds.
// Every trajectory starts in the ground state at t = 0 and runs over the full
// drive. Trajectory (or block) b draws from mt19937_64 seeded with
// seed_seq{seed, b}, so results do not depend on how lanes are batched.
// Pure dephasing enters as an unrecorded jump to the excited state.

// Exact 2x2 propagator of the no-jump evolution over h for a constant drive.
simd::Propagator2 no_jump_propagator(const EmitterParams& params, cplx rabi, double detuning,
                                     double h);

// Emission times (s) of one trajectory.
std::vector<double> mc_trajectory(const EmitterParams& params, const DriveWaveform& drive,
                                  std::uint64_t seed);

// n independent trajectories, emission times relative to each start.
std::vector<std::vector<double>> mc_ensemble(const EmitterParams& params,
                                             const DriveWaveform& drive, std::size_t n,
                                             std::uint64_t seed);

// Trajectory-averaged excited population at every drive sample time, with
// its standard error.
struct PopulationEstimate {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> std_error;
};
PopulationEstimate mc_population(const EmitterParams& params, const DriveWaveform& drive,
                                 std::size_t n, std::uint64_t seed);

// Continuous emission record: n_blocks back-to-back repetitions of drive,
// block b occupying [b T, (b + 1) T) with T = drive.duration(). Each block
// starts from the ground state. Sorted.
std::vector<double> emission_stream(const EmitterParams& params, const DriveWaveform& drive,
                                    std::size_t n_blocks, std::uint64_t seed);

inline constexpr std::size_t kTrajectoryLanes = 64;

}  // namespace heitler
