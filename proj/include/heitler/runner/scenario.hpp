#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heitler/emitter/params.hpp"
#include "heitler/heterodyne/beat.hpp"
#include "heitler/heterodyne/spectrum.hpp"
#include "heitler/hom/interferometer.hpp"
#include "heitler/photon/detection.hpp"
#include "heitler/waveform/synth.hpp"

namespace heitler {

// Artifacts a scenario can request, and the sections each one needs.
//   beat_spectrum   heterodyne, phase_noise
//   laser_waveform  waveform
//   laser_spectrum  waveform, spectrometer
//   qd_spectrum     emitter, waveform, spectrometer
//   pulse_response  emitter, waveform (pulse_train)
//   hbt             emitter, waveform, detection, stream
//   hom             emitter, waveform (pulse_train), detection, stream, interferometer
const std::vector<std::string>& known_outputs();

struct WaveformSection {
  ModulationSpec spec;
  double saturation = 0.0;         // mean s (sine_am, constant) or peak s (carrier_suppressed)
  double coherent_fraction = 0.0;  // pulse_train calibration target
  double duration = 0.0;           // s
  double sample_rate = kDefaultSampleRate;
  std::size_t n_pulses = 3;        // pulses per stream block
};

struct StreamSection {
  std::size_t blocks = 0;
  double window = 0.0;  // s, histogram half range
};

struct HeterodyneSection {
  HeterodyneConfig config;
  PhaseNoiseModel noise;
  Window window = Window::rectangular;
  std::string noise_provenance;  // free text carried into the outputs
};

struct InterferometerSection {
  InterferometerConfig config;
  double p_pa_sigma = 0.0;
};

struct SpectrometerSection {
  double resolution = 0.0;  // Hz FWHM
  double span = 0.0;        // Hz, half range kept around the carrier
};

struct Scenario {
  std::string name;
  std::string origin;  // file path or "<string>"
  std::vector<std::string> outputs;
  std::map<std::string, std::uint64_t> seeds;
  std::optional<EmitterParams> emitter;
  std::optional<WaveformSection> waveform;
  std::optional<DetectionChain> detection;
  std::optional<StreamSection> stream;
  std::optional<HeterodyneSection> heterodyne;
  std::optional<InterferometerSection> interferometer;
  std::optional<SpectrometerSection> spectrometer;

  bool wants(const std::string& output) const;
  std::uint64_t seed(const std::string& key) const;
};

// Parses and validates an INI scenario. Unknown sections or keys, missing
// sections, sections no requested output needs and missing seeds all raise
// ValidationError naming the field.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace heitler
