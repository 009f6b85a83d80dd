#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gen.hpp"
#include "heitler/common.hpp"
#include "heitler/emitter/bloch.hpp"
#include "heitler/emitter/params.hpp"
#include "heitler/waveform/drive.hpp"
#include "heitler/waveform/io.hpp"
#include "heitler/waveform/response.hpp"
#include "heitler/waveform/synth.hpp"

using namespace heitler;

namespace {

const EmitterParams kQd = EmitterParams::from_lifetime(0.65e-9);

// RMS of Bloch <sigma> minus the linear response, relative to the RMS of the
// linear response.
double weak_drive_rms_error(const DriveWaveform& drive, const EmitterParams& p) {
  const DriveWaveform lin = heitler_response(drive, p);
  const auto grid = covering_grid(drive.duration() - drive.dt(), max_grid_step(p, drive));
  const BlochTrajectory tr = solve_bloch(p, drive, grid);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    num += std::norm(tr.states[i].rho_ge - lin.at(grid[i]));
    den += std::norm(lin.at(grid[i]));
  }
  return std::sqrt(num / den);
}

DriveWaveform random_drive(gen::Gen& g, std::size_t n, double scale) {
  return DriveWaveform(g.complexes(n, scale), 20e9);
}

}  // namespace

TEST_CASE("drive waveform basics") {
  const DriveWaveform d({1.0, {0.0, 2.0}, 3.0}, 10.0, 0.5);
  CHECK(d.duration() == doctest::Approx(0.3));
  CHECK(d.at(0.05) == cplx(0.5, 1.0));
  CHECK(d.at(0.25) == cplx(3.0, 0.0));
  CHECK(d.at(0.3) == cplx(0.0, 0.0));
  CHECK(d.at(-0.01) == cplx(0.0, 0.0));
  CHECK(d.max_abs() == 3.0);
  CHECK(d.mean_intensity() == doctest::Approx(14.0 / 3.0));
  CHECK(d.slice(1, 2).samples()[0] == cplx(0.0, 2.0));
  CHECK(d.scaled(2.0).samples()[2] == cplx(6.0, 0.0));
  CHECK_THROWS_AS(d.slice(2, 5), PreconditionError);
  CHECK_THROWS_AS(DriveWaveform({1.0}, 0.0), PreconditionError);
  CHECK_THROWS_AS(DriveWaveform({1.0}, 10.0, 0.0, 6.0), PreconditionError);
  CHECK_THROWS_AS(DriveWaveform({std::nan("")}, 10.0), PreconditionError);
}

TEST_CASE("synthesized waveforms") {
  const DriveWaveform am = sine_am(200e6, 0.5, 1e8, 102e-9);
  CHECK(am.size() == 2000);  // rounded to 20 whole periods
  CHECK(am.mean_intensity() == doctest::Approx(1e16).epsilon(1e-12));
  CHECK(std::norm(am.samples()[0]) == doctest::Approx(1.5e16));
  CHECK(am.max_modulation_freq() == 200e6);

  const DriveWaveform cs = carrier_suppressed(200e6, 100e-9, 20e9, 3.0);
  CHECK(std::abs(cs.mean()) < 1e-12);
  CHECK(cs.samples()[0] == cplx(3.0, 0.0));

  const DriveWaveform pt = pulse_train(500e-12, 300e6, 2.0, 3);
  CHECK(pt.duration() == doctest::Approx(3.0 / 300e6).epsilon(1e-12));
  std::size_t on = 0;
  for (const cplx& v : pt.samples()) on += std::abs(v) > 0.0;
  CHECK(on == 30);  // 10 samples per 500 ps pulse
  const DriveWaveform smooth = pulse_train(500e-12, 300e6, 2.0, 1, 20e9, 100e-12);
  CHECK(std::abs(smooth.samples()[0]) < 2.0);

  CHECK_THROWS_AS(sine_am(200e6, 1.5, 1.0, 1e-8), PreconditionError);
  CHECK_THROWS_AS(sine_am(20e9, 0.5, 1.0, 1e-8), PreconditionError);
  CHECK_THROWS_AS(pulse_train(4e-9, 300e6, 1.0, 3), PreconditionError);
  CHECK_THROWS_AS(pulse_train(500e-12, 300e6, 1.0, 0), PreconditionError);
  CHECK_THROWS_AS(pulse_train(500e-12, 300e6, 1.0, 3, 20e9, 300e-12), PreconditionError);
}

TEST_CASE("waveform spectrum obeys Parseval") {
  for (int c = 0; c < 30; ++c) {
    gen::Gen g(700 + c);
    const DriveWaveform d(g.complexes(g.size(1, 3000)), g.uniform(1e9, 4e10), g.uniform(-1e9, 1e9));
    double energy = 0.0;
    for (const cplx& v : d.samples()) energy += std::norm(v) * d.dt();
    const Spectrum sp = waveform_spectrum(d);
    CAPTURE(c);
    CHECK(sp.continuum() == doctest::Approx(energy).epsilon(1e-6));
  }
}

TEST_CASE("spectrum axis: a component exp(-i 2 pi nu t) sits at +nu") {
  const double nu = 100e6, fs = 20e9;
  std::vector<cplx> s(2000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::polar(1.0, -kTwoPi * nu * static_cast<double>(i) / fs);
  const Spectrum sp = waveform_spectrum(DriveWaveform(s, fs, 0.0, nu));
  CHECK(sp.freq_hz[sp.peak_index()] == doctest::Approx(nu));
  // Carrier detuning shifts the whole axis.
  const Spectrum shifted = waveform_spectrum(DriveWaveform(s, fs, kTwoPi * 50e6, nu));
  CHECK(shifted.freq_hz[shifted.peak_index()] == doctest::Approx(nu + 50e6));
}

TEST_CASE("pulse-train spectrum is a comb at the repetition rate") {
  const DriveWaveform pt = pulse_train(500e-12, 300e6, 1.0, 30);
  const Spectrum sp = waveform_spectrum(pt);
  const double bin = sp.bin_width();
  for (int k = -3; k <= 3; ++k) {
    const double f = 300e6 * k;
    // Exactly periodic record: power off the comb vanishes.
    CHECK(line_power(sp, f, 0) > 1e6 * line_power(sp, f + 2.0 * bin, 0) + 1e-300);
  }
  CHECK(300e6 / bin == doctest::Approx(30.0));
}

TEST_CASE("heitler response is linear") {
  for (int c = 0; c < 20; ++c) {
    gen::Gen g(800 + c);
    const std::size_t n = g.size(2, 400);
    const double scale = 1e7;
    const DriveWaveform x = random_drive(g, n, scale), y = random_drive(g, n, scale);
    const cplx a{g.normal(), g.normal()}, b{g.normal(), g.normal()};
    std::vector<cplx> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = a * x.samples()[i] + b * y.samples()[i];
    const EmitterParams p(kQd.gamma(), g.log_uniform(1e6, 1e9), g.uniform(-1e9, 1e9));
    const DriveWaveform rx = heitler_response(x, p), ry = heitler_response(y, p);
    const DriveWaveform rm = heitler_response(DriveWaveform(mix, 20e9), p);
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx expect = a * rx.samples()[i] + b * ry.samples()[i];
      worst = std::max(worst, std::abs(rm.samples()[i] - expect));
      peak = std::max(peak, std::abs(expect));
    }
    CAPTURE(c);
    CHECK(worst <= 1e-9 * peak);
  }
}

TEST_CASE("CW on resonance scales the input") {
  const double rabi = rabi_for_saturation(kQd, 0.01);
  const DriveWaveform d = DriveWaveform::constant(rabi, 60e-9, 20e9);
  const DriveWaveform r = heitler_response(d, kQd);
  // -i rabi / (2 gamma2) once the transient has gone.
  CHECK(std::abs(r.samples().back() - cplx(0.0, -rabi / (2.0 * kQd.coherence_decay()))) <
        1e-9 * rabi / kQd.gamma());
}

TEST_CASE("heitler regime guard") {
  const DriveWaveform strong = DriveWaveform::constant(rabi_for_saturation(kQd, 0.5), 2e-9, 20e9);
  CHECK(weak_drive_saturation(strong, kQd) == doctest::Approx(0.5));
  CHECK_THROWS_AS(heitler_response(strong, kQd), PreconditionError);
}

TEST_CASE("weak drive: Bloch and linear response agree within 2% RMS at s <= 0.01") {
  const double s = 0.01;
  const double rabi = rabi_for_saturation(kQd, s);
  SUBCASE("sine AM") {
    const DriveWaveform d = sine_am(200e6, 0.8, rabi / std::sqrt(1.8), 20e-9);
    CHECK(weak_drive_saturation(d, kQd) <= s * (1.0 + 1e-9));
    CHECK(weak_drive_rms_error(d, kQd) < 0.02);
  }
  SUBCASE("carrier suppressed") {
    const DriveWaveform d = carrier_suppressed(200e6, 20e-9, 20e9, rabi);
    CHECK(weak_drive_rms_error(d, kQd) < 0.02);
  }
  SUBCASE("pulse train") {
    const DriveWaveform d = pulse_train(500e-12, 300e6, rabi, 3);
    CHECK(weak_drive_rms_error(d, kQd) < 0.02);
  }
}

TEST_CASE("weak drive deviation at s = 0.05 is the saturation factor") {
  // Steady <sigma> is the linear value divided by 1 + s, so the deviation
  // under CW is s / (1 + s), above 2% at s = 0.05.
  const double s = 0.05;
  const DriveWaveform d = DriveWaveform::constant(rabi_for_saturation(kQd, s), 30e-9, 20e9);
  const double err = weak_drive_rms_error(d.slice(0, d.size()), kQd);
  const DriveWaveform lin = heitler_response(d, kQd);
  const BlochState ss = steady_state(kQd, rabi_for_saturation(kQd, s));
  CHECK(std::abs(ss.rho_ge) / std::abs(lin.samples().back()) == doctest::Approx(1.0 / (1.0 + s)).epsilon(1e-9));
  CHECK(err == doctest::Approx(s / (1.0 + s)).epsilon(0.1));
}

TEST_CASE("rectangular pulse leaves an exponential tail with time constant T1") {
  const EmitterParams p = EmitterParams::from_lifetime(0.65e-9);
  std::vector<cplx> s(200, 0.0);
  for (std::size_t i = 20; i < 30; ++i) s[i] = rabi_for_saturation(p, 0.01);
  const DriveWaveform r = heitler_response(DriveWaveform(s, 20e9), p);
  const double end = 30.0 / 20e9;
  const double tau = tail_time_constant(r, end + 0.1e-9, end + 3.0 * 0.65e-9);
  // The amplitude pole at gamma/2 gives an intensity decay at gamma.
  CHECK(tau == doctest::Approx(0.65e-9).epsilon(0.02));
  CHECK(tau == doctest::Approx(1.0 / (2.0 * p.coherence_decay())).epsilon(1e-6));
}

TEST_CASE("tail fit recovers a synthetic decay") {
  for (int c = 0; c < 20; ++c) {
    gen::Gen g(900 + c);
    const double tau = g.log_uniform(1e-10, 1e-8), fs = 20e9;
    std::vector<cplx> s(4000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = std::polar(std::exp(-0.5 * static_cast<double>(i) / fs / tau), g.uniform(0, kTwoPi));
    }
    const DriveWaveform d(s, fs);
    CHECK(tail_time_constant(d, 0.0, std::min(3.0 * tau, 1.9e-7)) == doctest::Approx(tau).epsilon(1e-9));
  }
  const DriveWaveform flat = DriveWaveform::constant(1.0, 1e-9, 20e9);
  CHECK_THROWS_AS(tail_time_constant(flat, 0.0, 0.5e-9), PreconditionError);
  CHECK_THROWS_AS(tail_time_constant(flat, 0.0, 0.05e-9), PreconditionError);
}

TEST_CASE("Lorentzian sideband weight at 200 MHz for T1 = 0.65 ns") {
  CHECK(lorentzian_weight(kQd, 200e6) == doctest::Approx(0.27258).epsilon(1e-4));
  CHECK(lorentzian_weight(kQd, 0.0) == 1.0);
  // A detuned emitter favours the component on the side of its transition.
  const EmitterParams detuned = kQd.with_detuning(-kTwoPi * 200e6);
  CHECK(lorentzian_weight(detuned, 200e6) == doctest::Approx(1.0 / 0.27258).epsilon(1e-4));
}

TEST_CASE("sideband and carrier measures") {
  const double fm = 200e6;
  const DriveWaveform cs = carrier_suppressed(fm, 200e-9, 20e9, 1.0);
  const Spectrum sp = waveform_spectrum(cs);
  CHECK(carrier_suppression_db(sp, fm) < -100.0);
  const DriveWaveform am = sine_am(fm, 0.0, 1.0, 200e-9);
  CHECK_THROWS_AS(carrier_suppression_db(waveform_spectrum(am), fm), PreconditionError);
  CHECK_THROWS_AS(line_power(sp, 1e12), PreconditionError);
  // Weak linear response weights the sidebands by the Lorentzian factor.
  const DriveWaveform weak = sine_am(fm, 0.8, rabi_for_saturation(kQd, 0.01) / std::sqrt(1.8), 200e-9);
  const double w = sideband_ratio(waveform_spectrum(heitler_response(weak, kQd)), fm) /
                   sideband_ratio(waveform_spectrum(weak), fm);
  CHECK(w == doctest::Approx(lorentzian_weight(kQd, fm)).epsilon(0.1));
}

TEST_CASE("pulse amplitude calibration") {
  const PulseCalibration c = calibrate_pulse_amplitude(kQd, 500e-12, 300e6, 0.9, 20e9);
  CHECK(c.coherent_fraction == doctest::Approx(0.9).epsilon(1e-4));
  const PulseCalibration again = pulsed_scattering(kQd, 500e-12, 300e6, c.peak_rabi, 20e9);
  CHECK(again.coherent_fraction == doctest::Approx(c.coherent_fraction).epsilon(1e-9));
  CHECK(again.emissions_per_pulse == doctest::Approx(c.emissions_per_pulse).epsilon(1e-9));
  // Weaker pulses scatter less and more coherently.
  const PulseCalibration weak = pulsed_scattering(kQd, 500e-12, 300e6, 0.5 * c.peak_rabi, 20e9);
  CHECK(weak.coherent_fraction > c.coherent_fraction);
  CHECK(weak.emissions_per_pulse < c.emissions_per_pulse);
  CHECK_THROWS_AS(calibrate_pulse_amplitude(kQd, 500e-12, 300e6, 1.2, 20e9), PreconditionError);
}

TEST_CASE("waveform IO round trips") {
  for (int c = 0; c < 20; ++c) {
    gen::Gen g(1100 + c);
    const DriveWaveform d(g.complexes(g.size(1, 300), 1e9), g.uniform(1e9, 4e10), g.uniform(-1e9, 1e9));
    const DriveWaveform b = waveform_from_binary(waveform_to_binary(d));
    CHECK(std::equal(b.samples().begin(), b.samples().end(), d.samples().begin()));
    CHECK(b.sample_rate() == d.sample_rate());
    CHECK(b.carrier_detuning() == d.carrier_detuning());
    const DriveWaveform t = waveform_from_csv(waveform_to_csv(d));
    CHECK(std::equal(t.samples().begin(), t.samples().end(), d.samples().begin()));
    CHECK(t.sample_rate() == d.sample_rate());
  }
  const auto dir = std::filesystem::temp_directory_path() / "heitler_wf_test";
  std::filesystem::create_directories(dir);
  const DriveWaveform d = pulse_train(500e-12, 300e6, 1e9, 2);
  write_waveform(dir / "w.bin", d);
  write_waveform(dir / "w.csv", d);
  CHECK(read_waveform(dir / "w.bin").size() == d.size());
  CHECK(read_waveform(dir / "w.csv").size() == d.size());
  CHECK_THROWS_AS(read_waveform(dir / "missing.bin"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("waveform readers reject corrupt input") {
  const std::string good = waveform_to_binary(DriveWaveform::constant(1.0, 1e-9, 20e9));
  CHECK_THROWS_AS(waveform_from_binary("XXXX" + good.substr(4)), IoError);
  CHECK_THROWS_AS(waveform_from_binary(good.substr(0, good.size() - 3)), IoError);
  CHECK_THROWS_AS(waveform_from_binary(good.substr(0, 10)), IoError);
  CHECK_THROWS_AS(waveform_from_csv("a,b,c\n1,2,3\n"), IoError);
  CHECK_THROWS_AS(waveform_from_csv("time_s,re_field,im_field\n0,1\n"), IoError);
  CHECK_THROWS_AS(waveform_from_csv("time_s,re_field,im_field\n0,1,0\n"), IoError);
  // Sample rate inferred from the time column without the annotation.
  const DriveWaveform t = waveform_from_csv("time_s,re_field,im_field\n0,1,0\n1e-10,2,0\n");
  CHECK(t.sample_rate() == doctest::Approx(1e10));
}
