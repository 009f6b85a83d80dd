#include "heitler/photon/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace heitler {

namespace {

std::mt19937_64 lane_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Shared machinery: one lane per trajectory, all lanes driven by the same
// waveform (and the same spectral-wander path within a batch).
class LaneRunner {
 public:
  LaneRunner(const EmitterParams& params, const DriveWaveform& drive)
      : params_(params), n_(drive.size()), h_(drive.dt()) {
    const auto s = drive.samples();
    mid_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const cplx next = k + 1 < n_ ? s[k + 1] : s[k];
      mid_[k] = 0.5 * (s[k] + next);
    }
    delta0_ = params.detuning_offset() + drive.carrier_detuning();
    const double kappa = params.gamma() + 2.0 * params.pure_dephasing();
    p_emit_ = params.gamma() / kappa;
    wander_ = params.diffusion() && params.diffusion()->rms_detuning > 0.0;
    if (!wander_) fill_props(std::vector<double>());
  }

  std::size_t steps() const { return n_; }
  double step() const { return h_; }

  // on_emit(lane, t) for every recorded photon; on_step(k, lanes, norms)
  // after step k, i.e. at time (k + 1) h.
  template <typename OnEmit, typename OnStep>
  void run(std::uint64_t seed, std::size_t first, std::size_t count, OnEmit&& on_emit,
           OnStep&& on_step) {
    if (wander_) {
      SpectralDiffusion d = *params_.diffusion();
      d.seed = d.seed ^ (0x9e3779b97f4a7c15ULL * (first + 1));
      fill_props(ou_detuning_path(d, n_, h_));
    }
    simd::LaneBlock lanes(count);
    std::vector<std::mt19937_64> rng;
    rng.reserve(count);
    std::vector<double> thr(count), norms(count), prev(count, 1.0);
    for (std::size_t l = 0; l < count; ++l) {
      rng.push_back(lane_rng(seed, first + l));
      thr[l] = uniform(rng[l]);
    }
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t crossed = simd::propagate_lanes(props_[k], lanes, thr, norms);
      if (crossed > 0) {
        const double tk = static_cast<double>(k) * h_;
        for (std::size_t l = 0; l < count; ++l) {
          if (norms[l] < thr[l]) {
            norms[l] = jump(lanes, l, k, tk, prev[l], norms[l], thr[l], rng[l], on_emit);
          }
        }
      }
      on_step(k, lanes, norms);
      prev.swap(norms);
    }
  }

 private:
  static double uniform(std::mt19937_64& g) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(g);
  }

  void fill_props(const std::vector<double>& wander) {
    props_.resize(n_);
    det_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      det_[k] = delta0_ + (wander.empty() ? 0.0 : wander[k]);
      props_[k] = no_jump_propagator(params_, mid_[k], det_[k], h_);
    }
  }

  // Resolves every jump inside step k for one lane and returns the norm at
  // the end of the step.
  template <typename OnEmit>
  double jump(simd::LaneBlock& lanes, std::size_t l, std::size_t k, double tk, double n0,
              double n1, double& thr, std::mt19937_64& g, OnEmit& on_emit) {
    double ts = tk, hs = h_;
    for (int guard = 0; guard < 64 && n1 < thr; ++guard) {
      // Norm decays close to exponentially within a step.
      double frac = std::log(n0 / thr) / std::log(n0 / n1);
      if (!std::isfinite(frac)) frac = 1.0;
      frac = std::clamp(frac, 0.0, 1.0);
      const double tj = ts + frac * hs;
      if (uniform(g) < p_emit_) {
        on_emit(l, tj);
        lanes.reset_ground(l);
      } else {
        lanes.reset_excited(l);
      }
      thr = uniform(g);
      ts = tj;
      hs = (tk + h_) - tj;
      n0 = 1.0;
      if (hs <= 0.0) return 1.0;
      const simd::Propagator2 u = no_jump_propagator(params_, mid_[k], det_[k], hs);
      const cplx gg(lanes.g_re[l], lanes.g_im[l]), ee(lanes.e_re[l], lanes.e_im[l]);
      const cplx ng = u.u00 * gg + u.u01 * ee;
      const cplx ne = u.u10 * gg + u.u11 * ee;
      lanes.g_re[l] = ng.real();
      lanes.g_im[l] = ng.imag();
      lanes.e_re[l] = ne.real();
      lanes.e_im[l] = ne.imag();
      n1 = std::norm(ng) + std::norm(ne);
    }
    return n1;
  }

  const EmitterParams& params_;
  std::size_t n_;
  double h_;
  double delta0_ = 0.0;
  double p_emit_ = 1.0;
  bool wander_ = false;
  std::vector<cplx> mid_;
  std::vector<double> det_;
  std::vector<simd::Propagator2> props_;
};

}  // namespace

simd::Propagator2 no_jump_propagator(const EmitterParams& params, cplx rabi, double detuning,
                                     double h) {
  const double kappa = params.gamma() + 2.0 * params.pure_dephasing();
  const cplx i{0.0, 1.0};
  // A = -i H_eff h with H_eff = [[0, rabi*/2], [rabi/2, -detuning - i kappa/2]].
  const cplx a01 = -i * h * 0.5 * std::conj(rabi);
  const cplx a10 = -i * h * 0.5 * rabi;
  const cplx a11 = i * h * detuning - 0.5 * h * kappa;
  const cplx m = 0.5 * a11;
  const cplx d = 0.5 * a11;
  const cplx q2 = d * d + a01 * a10;
  cplx ch, sh;  // cosh q, sinh(q)/q
  if (std::abs(q2) < 1e-6) {
    ch = 1.0 + q2 / 2.0 + q2 * q2 / 24.0 + q2 * q2 * q2 / 720.0;
    sh = 1.0 + q2 / 6.0 + q2 * q2 / 120.0 + q2 * q2 * q2 / 5040.0;
  } else {
    const cplx q = std::sqrt(q2);
    ch = std::cosh(q);
    sh = std::sinh(q) / q;
  }
  const cplx em = std::exp(m);
  return {em * (ch - sh * d), em * sh * a01, em * sh * a10, em * (ch + sh * d)};
}

std::vector<double> mc_trajectory(const EmitterParams& params, const DriveWaveform& drive,
                                  std::uint64_t seed) {
  return emission_stream(params, drive, 1, seed);
}

std::vector<std::vector<double>> mc_ensemble(const EmitterParams& params,
                                             const DriveWaveform& drive, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<std::vector<double>> out(n);
  LaneRunner runner(params, drive);
  for (std::size_t first = 0; first < n; first += kTrajectoryLanes) {
    const std::size_t count = std::min(kTrajectoryLanes, n - first);
    runner.run(
        seed, first, count, [&](std::size_t l, double t) { out[first + l].push_back(t); },
        [](std::size_t, const simd::LaneBlock&, const std::vector<double>&) {});
  }
  return out;
}

PopulationEstimate mc_population(const EmitterParams& params, const DriveWaveform& drive,
                                 std::size_t n, std::uint64_t seed) {
  LaneRunner runner(params, drive);
  const std::size_t steps = runner.steps();
  std::vector<double> sum(steps + 1, 0.0), sum2(steps + 1, 0.0);
  for (std::size_t first = 0; first < n; first += kTrajectoryLanes) {
    const std::size_t count = std::min(kTrajectoryLanes, n - first);
    runner.run(
        seed, first, count, [](std::size_t, double) {},
        [&](std::size_t k, const simd::LaneBlock& lanes, const std::vector<double>& norms) {
          double s = 0.0, s2 = 0.0;
          for (std::size_t l = 0; l < count; ++l) {
            const double pe =
                (lanes.e_re[l] * lanes.e_re[l] + lanes.e_im[l] * lanes.e_im[l]) / norms[l];
            s += pe;
            s2 += pe * pe;
          }
          sum[k + 1] += s;
          sum2[k + 1] += s2;
        });
  }
  PopulationEstimate out;
  out.t.resize(steps + 1);
  out.mean.resize(steps + 1);
  out.std_error.resize(steps + 1);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k <= steps; ++k) {
    out.t[k] = static_cast<double>(k) * runner.step();
    const double m = sum[k] / nn;
    const double var = std::max(0.0, sum2[k] / nn - m * m);
    out.mean[k] = m;
    out.std_error[k] = std::sqrt(var / std::max(1.0, nn - 1.0));
  }
  return out;
}

std::vector<double> emission_stream(const EmitterParams& params, const DriveWaveform& drive,
                                    std::size_t n_blocks, std::uint64_t seed) {
  std::vector<double> out;
  if (drive.empty() || n_blocks == 0) return out;
  const double block = drive.duration();
  LaneRunner runner(params, drive);
  for (std::size_t first = 0; first < n_blocks; first += kTrajectoryLanes) {
    const std::size_t count = std::min(kTrajectoryLanes, n_blocks - first);
    const std::size_t mark = out.size();
    runner.run(
        seed, first, count,
        [&](std::size_t l, double t) {
          out.push_back(static_cast<double>(first + l) * block + t);
        },
        [](std::size_t, const simd::LaneBlock&, const std::vector<double>&) {});
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(mark), out.end());
  }
  return out;
}

}  // namespace heitler
