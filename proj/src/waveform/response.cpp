#include "heitler/waveform/response.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "heitler/emitter/bloch.hpp"
#include "heitler/fft.hpp"
#include "heitler/simd/kernels.hpp"
#include "heitler/waveform/synth.hpp"

namespace heitler {

Spectrum waveform_spectrum(const DriveWaveform& drive) {
  if (drive.empty()) throw PreconditionError("waveform_spectrum: empty waveform");
  const std::size_t n = drive.size();
  const double dt = drive.dt();
  const std::vector<cplx> x = fft::shift(fft::dft(drive.samples(), fft::Sign::backward));
  Spectrum out;
  out.freq_hz = fft::shifted_frequencies(n, dt);
  const double shift = drive.carrier_detuning() / kTwoPi;
  for (double& f : out.freq_hz) f += shift;
  out.power.resize(n);
  simd::norm_sq(x, out.power);
  for (double& p : out.power) p *= dt * dt;
  return out;
}

double weak_drive_saturation(const DriveWaveform& drive, const EmitterParams& params) {
  const double rabi = drive.max_abs();
  return saturation_parameter(params, rabi, drive.carrier_detuning());
}

DriveWaveform heitler_response(const DriveWaveform& drive, const EmitterParams& params) {
  const double s = weak_drive_saturation(drive, params);
  if (s > kHeitlerMaxSaturation) {
    throw PreconditionError(fmt::format(
        "heitler_response: weak-drive limit violated, max s = {:.4g} > {}", s,
        kHeitlerMaxSaturation));
  }
  const double h = drive.dt();
  const cplx a(params.coherence_decay(), -(params.detuning_offset() + drive.carrier_detuning()));
  const cplx b(0.0, -0.5);
  const cplx ah = a * h;
  const cplx e = std::exp(-ah);
  // First-order-hold weights: int_0^h exp(-a(h - r)) dr and
  // int_0^h r exp(-a(h - r)) dr.
  const cplx c0 = (1.0 - e) / a;
  const cplx c1 = (h * 1.0 - c0) / a;
  std::span<const cplx> u = drive.samples();
  std::vector<cplx> y(u.size());
  cplx sigma{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    y[i] = sigma;
    const cplx u0 = u[i];
    const cplx u1 = i + 1 < u.size() ? u[i + 1] : u[i];
    sigma = e * sigma + b * (u0 * c0 + (u1 - u0) / h * c1);
  }
  return DriveWaveform(std::move(y), drive.sample_rate(), drive.carrier_detuning(),
                       drive.max_modulation_freq());
}

PulseCalibration pulsed_scattering(const EmitterParams& params, double pulse_width,
                                   double rep_rate, double peak_rabi, double sample_rate,
                                   double edge_time) {
  constexpr std::size_t kPeriods = 4;
  const DriveWaveform drive =
      pulse_train(pulse_width, rep_rate, peak_rabi, kPeriods, sample_rate, edge_time);
  const double step = max_grid_step(params, drive);
  const double period = 1.0 / rep_rate;
  const double t0 = static_cast<double>(kPeriods - 1) * period;
  const auto n = static_cast<std::size_t>(std::ceil(period / step)) + 1;
  std::vector<double> grid = linear_grid(t0, t0 + period, n);
  grid.back() = std::min(grid.back(), drive.duration());
  const BlochTrajectory traj = solve_bloch(params, drive, grid);
  const ScatteringTotals tot = integrate_scattering(params, traj);
  return {peak_rabi, tot.coherent_fraction, tot.emissions};
}

PulseCalibration calibrate_pulse_amplitude(const EmitterParams& params, double pulse_width,
                                           double rep_rate, double target_coherent_fraction,
                                           double sample_rate, double edge_time) {
  if (!(target_coherent_fraction > 0.0 && target_coherent_fraction < 1.0)) {
    throw PreconditionError("pulse calibration: coherent fraction target must lie in (0, 1)");
  }
  auto cf = [&](double rabi) {
    return pulsed_scattering(params, pulse_width, rep_rate, rabi, sample_rate, edge_time)
        .coherent_fraction;
  };
  double lo = 1e-3 * params.gamma();
  if (cf(lo) < target_coherent_fraction) {
    throw PreconditionError("pulse calibration: target coherent fraction unreachable");
  }
  double hi = lo;
  while (cf(hi) >= target_coherent_fraction) {
    lo = hi;
    hi *= 2.0;
    if (hi > 100.0 * params.gamma()) {
      throw PreconditionError("pulse calibration: no amplitude reaches the target");
    }
  }
  for (int it = 0; it < 50 && (hi - lo) > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cf(mid) >= target_coherent_fraction ? lo : hi) = mid;
  }
  return pulsed_scattering(params, pulse_width, rep_rate, 0.5 * (lo + hi), sample_rate,
                           edge_time);
}

double line_power(const Spectrum& spectrum, double freq_hz, int half_bins) {
  const std::size_t n = spectrum.freq_hz.size();
  if (n < 2) throw PreconditionError("line_power: spectrum too short");
  const double df = spectrum.bin_width();
  const double k0 = std::round((freq_hz - spectrum.freq_hz.front()) / df);
  if (k0 < 0.0 || k0 > static_cast<double>(n - 1)) {
    throw PreconditionError(fmt::format("line_power: {:.6g} Hz outside the spectrum", freq_hz));
  }
  const auto k = static_cast<long long>(k0);
  double sum = 0.0;
  for (long long i = std::max(0LL, k - half_bins);
       i <= std::min(static_cast<long long>(n) - 1, k + half_bins); ++i) {
    sum += spectrum.power[static_cast<std::size_t>(i)];
  }
  return sum * df;
}

double sideband_ratio(const Spectrum& spectrum, double offset_hz) {
  const double carrier = line_power(spectrum, 0.0);
  if (!(carrier > 0.0)) throw PreconditionError("sideband_ratio: no power at the carrier");
  return 0.5 * (line_power(spectrum, offset_hz) + line_power(spectrum, -offset_hz)) / carrier;
}

double carrier_suppression_db(const Spectrum& spectrum, double offset_hz) {
  const double side = std::max(line_power(spectrum, offset_hz), line_power(spectrum, -offset_hz));
  if (!(side > 0.0)) throw PreconditionError("carrier_suppression_db: no sideband power");
  // Floor keeps an exact null finite.
  const double carrier = std::max(line_power(spectrum, 0.0), 1e-300);
  return 10.0 * std::log10(carrier / side);
}

double lorentzian_weight(const EmitterParams& params, double offset_hz) {
  const double g2 = params.coherence_decay();
  const double d = params.detuning_offset();
  const double w = d + kTwoPi * offset_hz;
  return (g2 * g2 + d * d) / (g2 * g2 + w * w);
}

double tail_time_constant(const DriveWaveform& field, double t_from, double t_to) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double t = field.time(i);
    if (t < t_from || t > t_to) continue;
    const double p = std::norm(field.samples()[i]);
    if (!(p > 0.0)) continue;
    const double y = std::log(p);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++m;
  }
  if (m < 3) throw PreconditionError("tail_time_constant: fewer than 3 samples in the fit range");
  const double mm = static_cast<double>(m);
  const double slope = (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
  if (!(slope < 0.0)) throw PreconditionError("tail_time_constant: intensity is not decaying");
  return -1.0 / slope;
}

}  // namespace heitler
