#pragma once

#include "heitler/emitter/params.hpp"
#include "heitler/emitter/spectrum.hpp"
#include "heitler/waveform/drive.hpp"

namespace heitler {

// Energy spectral density of the field envelope, |dt sum x exp(+2 pi i nu t)|^2,
// on the FFT grid shifted by carrier_detuning / 2 pi. sum(power) * bin_width
// equals sum |x|^2 dt.
Spectrum waveform_spectrum(const DriveWaveform& drive);

// Largest saturation parameter reached along the waveform.
double weak_drive_saturation(const DriveWaveform& drive, const EmitterParams& params);

inline constexpr double kHeitlerMaxSaturation = 0.2;
inline constexpr double kHeitlerWarnSaturation = 0.1;

// Linear-response limit of the Bloch equations: <sigma> obeys
// d<sigma>/dt = -(gamma2 - i delta) <sigma> - i rabi(t) / 2, integrated
// exactly for the linearly interpolated drive. The amplitude pole sits at
// gamma/2, so the scattered intensity |<sigma>|^2 decays at gamma, i.e. with
// time constant t1. Throws when the drive saturates beyond
// kHeitlerMaxSaturation.
DriveWaveform heitler_response(const DriveWaveform& drive, const EmitterParams& params);

// Peak Rabi frequency of a periodic pulse train giving the requested
// time-averaged coherent fraction in the periodic steady state.
struct PulseCalibration {
  double peak_rabi = 0.0;
  double coherent_fraction = 0.0;
  double emissions_per_pulse = 0.0;
};
PulseCalibration calibrate_pulse_amplitude(const EmitterParams& params, double pulse_width,
                                           double rep_rate, double target_coherent_fraction,
                                           double sample_rate, double edge_time = 0.0);

// Time-averaged coherent fraction and mean emissions per period for a given
// pulse amplitude, evaluated on the last of several periods.
PulseCalibration pulsed_scattering(const EmitterParams& params, double pulse_width,
                                   double rep_rate, double peak_rabi, double sample_rate,
                                   double edge_time = 0.0);

// Integrated power of the line nearest freq_hz: the bins within half_bins of
// the closest grid point.
double line_power(const Spectrum& spectrum, double freq_hz, int half_bins = 1);

// Mean power of the lines at +-offset_hz over the line at zero detuning.
double sideband_ratio(const Spectrum& spectrum, double offset_hz);

// 10 log10 of the zero-detuning line over the stronger line at +-offset_hz.
double carrier_suppression_db(const Spectrum& spectrum, double offset_hz);

// Intensity weight the linear response gives a drive component offset_hz
// above the laser, relative to the carrier:
// (gamma2^2 + delta^2) / (gamma2^2 + (delta + 2 pi offset_hz)^2).
double lorentzian_weight(const EmitterParams& params, double offset_hz);

// Intensity time constant of the decay of |field|^2 between t_from and t_to,
// from a straight-line fit to log |field|^2.
double tail_time_constant(const DriveWaveform& field, double t_from, double t_to);

}  // namespace heitler
