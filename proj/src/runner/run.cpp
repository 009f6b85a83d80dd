#include "heitler/runner/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <json.hpp>

#include "heitler/common.hpp"
#include "heitler/emitter/bloch.hpp"
#include "heitler/heterodyne/linefit.hpp"
#include "heitler/photon/correlate.hpp"
#include "heitler/photon/trajectory.hpp"
#include "heitler/waveform/response.hpp"

#ifndef HEITLER_SCENARIO_DIR
#define HEITLER_SCENARIO_DIR "scenarios"
#endif
#ifndef HEITLER_VERSION
#define HEITLER_VERSION "0.0.0"
#endif

namespace heitler {

namespace fs = std::filesystem;

namespace {

Table histogram_table(const std::string& name, const std::string& annotation,
                      const CoincidenceHistogram& h) {
  return {name, annotation, {"tau_s", "counts", "normalized"}, {h.tau, h.counts, h.normalized}};
}

std::vector<double> scaled(std::vector<double> v, double f) {
  for (double& x : v) x *= f;
  return v;
}

Spectrum crop(const Spectrum& s, double half_span) {
  Spectrum out;
  for (std::size_t i = 0; i < s.freq_hz.size(); ++i) {
    if (std::abs(s.freq_hz[i]) <= half_span) {
      out.freq_hz.push_back(s.freq_hz[i]);
      out.power.push_back(s.power[i]);
    }
  }
  if (out.freq_hz.size() < 3) throw PreconditionError("spectrometer span holds fewer than 3 bins");
  return out;
}

std::vector<double> normalized_to_peak(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  return scaled(v, m > 0.0 ? 1.0 / m : 1.0);
}

class Runner {
 public:
  explicit Runner(const Scenario& sc) : sc_(sc) { out_.scenario = sc.name; }

  RunResult run() {
    if (sc_.wants("beat_spectrum")) beat_spectrum();
    if (sc_.wants("laser_waveform")) laser_waveform();
    if (sc_.wants("laser_spectrum") || sc_.wants("qd_spectrum")) spectra();
    if (sc_.wants("pulse_response")) pulse_response();
    if (sc_.wants("hbt") || sc_.wants("hom")) photon_streams();
    for (const auto& [name, q] : out_.quantities) {
      if (!std::isfinite(q.value) || !std::isfinite(q.sigma)) {
        out_.validations.push_back({"finite_" + name, false, "quantity is not finite"});
      }
    }
    return std::move(out_);
  }

 private:
  void put(const std::string& name, double value, double sigma, const std::string& unit) {
    out_.quantities[name] = {value, sigma, unit};
  }
  void check(const std::string& name, bool passed, const std::string& detail) {
    out_.validations.push_back({name, passed, detail});
  }
  std::string note(const std::string& what) const {
    return fmt::format("scenario={} {}", sc_.name, what);
  }

  // Rabi amplitude of the configured drive; without an emitter the
  // waveform is built in units of its own scale.
  double drive_scale() const {
    const WaveformSection& w = *sc_.waveform;
    if (!sc_.emitter) return 1.0;
    return rabi_for_saturation(*sc_.emitter, w.saturation);
  }

  PulseCalibration& calibration() {
    if (!calibration_) {
      const WaveformSection& w = *sc_.waveform;
      calibration_ = calibrate_pulse_amplitude(*sc_.emitter, w.spec.pulse_width, w.spec.rep_rate,
                                               w.coherent_fraction, w.sample_rate,
                                               w.spec.edge_time);
      put("pulse_peak_rabi", calibration_->peak_rabi, 0.0, "rad/s");
      put("pulse_coherent_fraction", calibration_->coherent_fraction, 0.0, "");
      put("pulse_emissions_per_pulse_bloch", calibration_->emissions_per_pulse, 0.0, "");
    }
    return *calibration_;
  }

  DriveWaveform make_drive(std::size_t n_pulses) {
    const WaveformSection& w = *sc_.waveform;
    switch (w.spec.kind) {
      case ModulationKind::sine_am:
        return sine_am(w.spec.mod_freq, w.spec.depth, drive_scale(), w.duration, w.sample_rate);
      case ModulationKind::carrier_suppressed:
        return carrier_suppressed(w.spec.mod_freq, w.duration, w.sample_rate, drive_scale());
      case ModulationKind::pulse_train: {
        const double peak = sc_.emitter ? calibration().peak_rabi : 1.0;
        return pulse_train(w.spec.pulse_width, w.spec.rep_rate, peak, n_pulses, w.sample_rate,
                           w.spec.edge_time);
      }
      case ModulationKind::custom:
        break;
    }
    throw ValidationError("[waveform] kind: custom waveforms cannot be run from a scenario");
  }

  void beat_spectrum() {
    const HeterodyneSection& h = *sc_.heterodyne;
    const BeatTrace trace = beat_signal(h.config, h.noise, sc_.seed("heterodyne"));
    const HeterodyneAnalysis a = analyze_beat(trace, h.config, h.window);
    const LineFit& f = a.fit;
    std::vector<double> offset(a.spectrum.freq_hz.size()), fit(offset.size());
    const double sig = f.fwhm / kFwhmPerSigma;
    for (std::size_t i = 0; i < offset.size(); ++i) {
      offset[i] = a.spectrum.freq_hz[i] - h.config.delta_nu;
      const double u = (a.spectrum.freq_hz[i] - f.center) / sig;
      fit[i] = f.amplitude * std::exp(-0.5 * u * u) + f.background;
    }
    const std::string prov = h.noise_provenance.empty() ? "" : ", phase noise " + h.noise_provenance;
    out_.tables.push_back({"beat_spectrum",
                           note(fmt::format("window={} rbw_hz={:.6g} delta_nu_hz={:.6g} "
                                            "power in units^2/Hz{}",
                                            window_name(h.window), a.spectrum.resolution_bandwidth,
                                            h.config.delta_nu, prov)),
                           {"freq_offset_hz", "power_per_hz", "gaussian_fit_per_hz"},
                           {offset, a.spectrum.power, fit}});
    out_.plots.push_back({"beat_spectrum", "Beat note around delta_nu", "frequency - delta_nu (Hz)",
                          "power (units^2/Hz)", {{"spectrum", offset, a.spectrum.power},
                                                 {"Gaussian fit", offset, fit}}});
    put("beat_fwhm_hz", f.fwhm, f.fwhm_sigma, "Hz");
    put("beat_center_hz", f.center, f.center_sigma, "Hz");
    put("resolution_bandwidth_hz", a.spectrum.resolution_bandwidth, 0.0, "Hz");
    put("random_walk_diffusion_rad2_per_s", h.noise.random_walk_diffusion, 0.0, "rad^2/s");
    const double rel = f.fwhm_sigma / f.fwhm;
    put("tau_c_s", a.coherence.tau_c, a.coherence.tau_c * rel, "s");
    put("coherence_length_m", a.coherence.length, a.coherence.length * rel, "m");
    if (!h.noise_provenance.empty()) out_.notes.push_back("phase noise: " + h.noise_provenance);
    check("beat_peak_found", f.points >= 6, fmt::format("{} points in the fit window", f.points));
  }

  void laser_waveform() {
    const DriveWaveform d = make_drive(sc_.waveform->spec.kind == ModulationKind::pulse_train
                                           ? sc_.waveform->n_pulses
                                           : 0);
    std::vector<double> t(d.size()), inten(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      t[i] = d.time(i);
      inten[i] = std::norm(d.samples()[i]);
    }
    inten = normalized_to_peak(inten);
    out_.tables.push_back({"laser_waveform", note("intensity normalized to its peak"),
                           {"time_s", "intensity"}, {t, inten}});
    // Plot a few modulation periods at most.
    const std::size_t shown = std::min<std::size_t>(t.size(), 400);
    out_.plots.push_back({"laser_waveform", "Laser intensity", "time (ns)", "intensity (norm.)",
                          {{"laser", scaled({t.begin(), t.begin() + static_cast<std::ptrdiff_t>(shown)}, 1e9),
                            {inten.begin(), inten.begin() + static_cast<std::ptrdiff_t>(shown)}}}});
  }

  void spectra() {
    const WaveformSection& w = *sc_.waveform;
    if (w.spec.kind == ModulationKind::pulse_train) {
      throw ValidationError("[waveform] kind: spectra are defined for sine_am and carrier_suppressed");
    }
    const SpectrometerSection& sp = *sc_.spectrometer;
    const DriveWaveform drive = make_drive(0);
    const Spectrum laser = waveform_spectrum(drive);
    const double fm = w.spec.mod_freq;
    const bool suppressed = w.spec.kind == ModulationKind::carrier_suppressed;

    const Spectrum laser_seen = apply_instrument_response(crop(laser, sp.span), sp.resolution);
    std::vector<std::string> cols = {"freq_hz", "laser_power"};
    std::vector<std::vector<double>> data = {laser_seen.freq_hz, normalized_to_peak(laser_seen.power)};
    std::vector<Curve> curves = {{"laser", scaled(laser_seen.freq_hz, 1e-6), data[1]}};
    if (suppressed) {
      put("laser_carrier_db", carrier_suppression_db(laser, fm), 0.0, "dB");
    } else {
      put("laser_sideband_ratio", sideband_ratio(laser, fm), 0.0, "");
    }

    if (sc_.wants("qd_spectrum")) {
      const EmitterParams& p = *sc_.emitter;
      const double s = weak_drive_saturation(drive, p);
      put("max_saturation", s, 0.0, "");
      check("heitler_regime", s <= kHeitlerMaxSaturation, fmt::format("max s = {:.4g}", s));
      if (s > kHeitlerWarnSaturation) {
        out_.notes.push_back(fmt::format("warning: max s = {:.4g} above {}", s, kHeitlerWarnSaturation));
      }
      const Spectrum qd = waveform_spectrum(heitler_response(drive, p));
      const Spectrum qd_seen = apply_instrument_response(crop(qd, sp.span), sp.resolution);
      cols.push_back("qd_power");
      data.push_back(normalized_to_peak(qd_seen.power));
      curves.push_back({"QD elastic", scaled(qd_seen.freq_hz, 1e-6), data.back()});
      // Strongest line above the carrier, located on the raw grid.
      std::size_t best = 0;
      for (std::size_t i = 0; i < qd.freq_hz.size(); ++i) {
        if (qd.freq_hz[i] > 0.5 * fm && qd.freq_hz[i] < 1.5 * fm &&
            (best == 0 || qd.power[i] > qd.power[best])) {
          best = i;
        }
      }
      put("qd_sideband_offset_hz", qd.freq_hz[best], qd.bin_width(), "Hz");
      put("spectrum_bin_hz", qd.bin_width(), 0.0, "Hz");
      put("lorentzian_weight", lorentzian_weight(p, fm), 0.0, "");
      if (suppressed) {
        put("qd_carrier_db", carrier_suppression_db(qd, fm), 0.0, "dB");
      } else {
        put("qd_sideband_ratio", sideband_ratio(qd, fm), 0.0, "");
        put("sideband_weight", sideband_ratio(qd, fm) / sideband_ratio(laser, fm), 0.0, "");
      }
    }
    const std::string name = sc_.wants("qd_spectrum") ? "qd_spectrum" : "laser_spectrum";
    out_.tables.push_back({name,
                           note(fmt::format("powers normalized to peak after a {:.4g} MHz Lorentzian "
                                            "instrument response",
                                            sp.resolution * 1e-6)),
                           cols, data});
    out_.plots.push_back({name, "Spectra", "detuning from carrier (MHz)", "power (norm.)", curves});
  }

  void pulse_response() {
    const EmitterParams& p = *sc_.emitter;
    const WaveformSection& w = *sc_.waveform;
    const DriveWaveform d = make_drive(2);
    const std::vector<double> grid = covering_grid(d.duration(), max_grid_step(p, d));
    const BlochTrajectory tr = solve_bloch(p, d, grid);
    const std::size_t n = tr.t.size();
    std::vector<double> laser(n), coh(n), pop(n);
    std::vector<cplx> sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
      laser[i] = std::norm(d.at(tr.t[i]));
      sigma[i] = tr.states[i].rho_ge;
      coh[i] = std::norm(sigma[i]);
      pop[i] = tr.states[i].rho_ee;
    }
    const double t_end = w.spec.pulse_width;
    const double tail = tail_time_constant(DriveWaveform(sigma, 1.0 / (tr.t[1] - tr.t[0])),
                                           t_end + 0.1 * p.t1_lifetime(), t_end + 3.0 * p.t1_lifetime());
    put("tail_time_constant_s", tail, 0.0, "s");
    put("tail_prediction_s", 1.0 / (2.0 * p.coherence_decay()), 0.0, "s");
    put("t1_lifetime_s", p.t1_lifetime(), 0.0, "s");
    const ScatteringTotals tot = integrate_scattering(p, tr);
    put("pulse_response_coherent_fraction", tot.coherent_fraction, 0.0, "");
    laser = normalized_to_peak(laser);
    coh = normalized_to_peak(coh);
    const double pmax = *std::max_element(pop.begin(), pop.end());
    std::vector<double> pop_n = scaled(pop, pmax > 0.0 ? 1.0 / pmax : 1.0);
    out_.tables.push_back({"pulse_response",
                           note("laser intensity, coherent intensity |<sigma>|^2 and excited "
                                "population, each normalized to its peak"),
                           {"time_s", "laser_intensity", "coherent_intensity", "excited_population"},
                           {tr.t, laser, coh, pop_n}});
    const std::vector<double> tn = scaled(tr.t, 1e9);
    out_.plots.push_back({"pulse_response", "Pulse and scattered intensity", "time (ns)",
                          "intensity (norm.)",
                          {{"laser", tn, laser}, {"coherent |<sigma>|^2", tn, coh},
                           {"excited population", tn, pop_n}}});
  }

  void photon_streams() {
    const EmitterParams& p = *sc_.emitter;
    const WaveformSection& w = *sc_.waveform;
    const StreamSection& st = *sc_.stream;
    const DetectionChain& chain = *sc_.detection;
    const bool pulsed = w.spec.kind == ModulationKind::pulse_train;

    const DriveWaveform block = make_drive(pulsed ? w.n_pulses : 0);
    const std::vector<double> emissions =
        emission_stream(p, block, st.blocks, sc_.seed("trajectory"));
    const double duration = block.duration() * static_cast<double>(st.blocks);
    const double period = pulsed ? 1.0 / w.spec.rep_rate : 0.0;
    put("emissions", static_cast<double>(emissions.size()), 0.0, "");
    if (pulsed) {
      const double pulses = static_cast<double>(st.blocks * w.n_pulses);
      put("emissions_per_pulse", static_cast<double>(emissions.size()) / pulses,
          std::sqrt(static_cast<double>(emissions.size())) / pulses, "");
    }

    const PhotonStream detected = apply_detection(emissions, chain, sc_.seed("detection"), duration);
    put("detected_photons", static_cast<double>(detected.size()), 0.0, "");
    check("photons_detected", detected.size() >= 2,
          fmt::format("{} detected photons", detected.size()));
    if (detected.size() < 2) return;
    auto [a, b] = hbt_split(detected, sc_.seed("hbt"));
    if (a.empty() || b.empty()) {
      check("hbt_both_arms", false, "one HBT arm received no photons");
      return;
    }
    const CoincidenceHistogram g2 = correlate_g2(a, b, chain.bin_width, st.window, duration, period);
    if (pulsed) {
      const int n_side = static_cast<int>(std::floor(st.window / period - 0.5));
      const PeakAreas areas = pulsed_peak_areas(g2, period, n_side);
      put("g2_zero_area_ratio", areas.ratio, areas.ratio_sigma, "");
    } else {
      const std::size_t z = g2.zero_bin();
      put("g2_zero", g2.normalized[z], std::sqrt(std::max(1.0, g2.counts[z])) / g2.expectation, "");
    }
    const std::vector<double> tau_ns = scaled(g2.tau, 1e9);
    if (sc_.wants("hbt")) {
      out_.tables.push_back(histogram_table(
          "hbt", note(fmt::format("bin_width_s={:.6g} long-delay expectation per bin={:.6g}",
                                  g2.bin_width, g2.expectation)),
          g2));
      out_.plots.push_back({"hbt", "Intensity autocorrelation", "delay (ns)", "g2 (norm.)",
                            {{"HBT", tau_ns, g2.normalized}}});
    }
    if (!sc_.wants("hom")) return;

    const InterferometerSection& ifm = *sc_.interferometer;
    DetectionChain thinning;
    thinning.efficiency = chain.efficiency;
    thinning.sideband_loss = chain.sideband_loss;
    const PhotonStream source = apply_detection(emissions, thinning, sc_.seed("detection"), duration);
    HomDetection hd;
    hd.period = period;
    hd.jitter_fwhm = chain.jitter_fwhm;
    hd.bin_width = chain.bin_width;
    hd.window = st.window;
    hd.duration = duration;
    const CoincidenceHistogram pa = simulate_hom(source, ifm.config, Polarization::parallel,
                                                 sc_.seed("hom_parallel"), hd);
    const CoincidenceHistogram po = simulate_hom(source, ifm.config, Polarization::orthogonal,
                                                 sc_.seed("hom_orthogonal"), hd);
    const DifferenceCurve dpa = normalized_difference(pa, g2);
    const DifferenceCurve dpo = normalized_difference(po, g2);
    const Contrast raw = contrast(difference_area(dpa, period), difference_area(dpo, period));
    const Contrast hist = contrast(central_area(pa, period), central_area(po, period));
    const InterferometerConfig& c = ifm.config;
    const double p_pa = c.pol_overlap_parallel, p_or = c.pol_overlap_orthogonal;
    const CorrectedContrast pol = corrected_contrast(raw, p_pa, p_or, c.t1, c.r1, c.t2, c.r2,
                                                     CorrectionMode::polarization_only, ifm.p_pa_sigma);
    const CorrectedContrast full = corrected_contrast(raw, p_pa, p_or, c.t1, c.r1, c.t2, c.r2,
                                                      CorrectionMode::full, ifm.p_pa_sigma);
    put("c_hom_raw", raw.value, raw.sigma, "");
    put("c_hom_histogram_area", hist.value, hist.sigma, "");
    put("c_hom_corrected_polarization", pol.value, pol.sigma, "");
    put("c_hom_corrected_full", full.value, full.sigma, "");
    put("polarization_factor", pol.polarization_factor, 0.0, "");
    put("beamsplitter_factor", full.beamsplitter_factor, 0.0, "");
    out_.notes.push_back(
        "c_hom_corrected_full is approximate: coherence beyond the interferometer delay is not "
        "modelled");
    out_.notes.push_back(
        "c_hom_raw uses areas of the normalized differences over one period around zero delay");

    const std::string ann = note(fmt::format("bin_width_s={:.6g} jitter_fwhm_s={:.6g}",
                                             chain.bin_width, chain.jitter_fwhm));
    out_.tables.push_back(histogram_table("hom_parallel", ann, pa));
    out_.tables.push_back(histogram_table("hom_orthogonal", ann, po));
    out_.tables.push_back({"hom_difference",
                           note("g_hom / g2 - 1, nan where g2 < 0.05"),
                           {"tau_s", "parallel", "orthogonal"},
                           {dpa.tau, dpa.value, dpo.value}});
    out_.plots.push_back({"hom", "Two-photon interference", "delay (ns)", "coincidences (norm.)",
                          {{"orthogonal", tau_ns, po.normalized},
                           {"parallel", tau_ns, pa.normalized},
                           {"HBT", tau_ns, g2.normalized}}});
    out_.plots.push_back({"hom_difference", "Normalized difference to g2", "delay (ns)",
                          "g_hom / g2 - 1", {{"orthogonal", tau_ns, dpo.value},
                                             {"parallel", tau_ns, dpa.value}}});
  }

  const Scenario& sc_;
  RunResult out_;
  std::optional<PulseCalibration> calibration_;
};

}  // namespace

bool RunResult::ok() const {
  return std::all_of(validations.begin(), validations.end(),
                     [](const Validation& v) { return v.passed; });
}

std::string RunResult::summary_json(const std::vector<std::string>& files) const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["version"] = HEITLER_VERSION;
  j["status"] = ok() ? "ok" : "failed";
  j["files"] = files;
  nlohmann::ordered_json q = nlohmann::ordered_json::object();
  for (const auto& [name, v] : quantities) {
    q[name] = {{"value", v.value}, {"sigma", v.sigma}, {"unit", v.unit}};
  }
  j["quantities"] = q;
  nlohmann::ordered_json val = nlohmann::ordered_json::array();
  for (const Validation& v : validations) {
    val.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  }
  j["validations"] = val;
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

RunResult run_scenario(const Scenario& scenario) { return Runner(scenario).run(); }

std::vector<fs::path> write_outputs(const RunResult& result, const fs::path& out_dir) {
  const std::string prov = fmt::format("heitler-lab {} scenario {}", HEITLER_VERSION, result.scenario);
  std::vector<std::string> names;
  for (const Table& t : result.tables) names.push_back(t.name + ".csv");
  for (const Plot& p : result.plots) names.push_back(p.name + ".svg");
  const std::string summary = result.summary_json(names);
  std::vector<fs::path> written = export_results(result.tables, result.plots, prov, out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
  write_text_file(out_dir / "summary.json", summary);
  written.push_back(out_dir / "summary.json");
  return written;
}

fs::path output_base(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("HEITLER_LAB_OUT"); env && *env) return env;
  return "heitler-out";
}

fs::path bundled_scenario_dir() { return HEITLER_SCENARIO_DIR; }

std::vector<std::string> figure_scenarios(const std::string& figure) {
  if (figure == "fig1b") return {"fig1b"};
  if (figure == "fig2") return {"fig2a", "fig2c"};
  if (figure == "fig3") return {"fig3"};
  throw ValidationError("unknown figure '" + figure + "' (expected fig1b, fig2 or fig3)");
}

const char* version() { return HEITLER_VERSION; }

}  // namespace heitler
