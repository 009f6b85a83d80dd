#include "heitler/runner/scenario.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "heitler/common.hpp"

namespace heitler {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// One INI section. Keys are consumed as they are read; whatever is left at
// finish() is unknown.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {
    for (const auto& [k, v] : tree_) {
      if (!v.empty()) throw ValidationError(fmt::format("[{}] {}: nested keys are not allowed", name_, k));
      pending_.insert(k);
    }
  }

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::string str(const std::string& key) {
    if (!has(key)) throw ValidationError(fmt::format("[{}] missing key '{}'", name_, key));
    pending_.erase(key);
    return trim(tree_.get<std::string>(key));
  }
  std::string str(const std::string& key, const std::string& fallback) {
    return has(key) ? str(key) : fallback;
  }

  double num(const std::string& key) {
    const std::string text = str(key);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size() || !std::isfinite(v)) {
      throw ValidationError(fmt::format("[{}] {}: expected a finite number, got '{}'", name_, key, text));
    }
    return v;
  }
  double num(const std::string& key, double fallback) { return has(key) ? num(key) : fallback; }

  double positive(const std::string& key) {
    const double v = num(key);
    if (!(v > 0.0)) throw ValidationError(fmt::format("[{}] {}: must be > 0, got {}", name_, key, v));
    return v;
  }
  double unit(const std::string& key, double fallback) {
    const double v = num(key, fallback);
    if (v < 0.0 || v > 1.0) {
      throw ValidationError(fmt::format("[{}] {}: must lie in [0, 1], got {}", name_, key, v));
    }
    return v;
  }
  double non_negative(const std::string& key, double fallback) {
    const double v = num(key, fallback);
    if (v < 0.0) throw ValidationError(fmt::format("[{}] {}: must be >= 0, got {}", name_, key, v));
    return v;
  }

  std::uint64_t count(const std::string& key) {
    const std::string text = str(key);
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size() || text.front() == '-') {
      throw ValidationError(
          fmt::format("[{}] {}: expected a non-negative integer, got '{}'", name_, key, text));
    }
    return v;
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    return has(key) ? count(key) : fallback;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& kv : tree_) out.push_back(kv.first);
    return out;
  }
  void consume(const std::string& key) { pending_.erase(key); }

  void finish() const {
    if (!pending_.empty()) {
      throw ValidationError(fmt::format("[{}] unknown key '{}'", name_, *pending_.begin()));
    }
  }

 private:
  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> pending_;
};

const std::map<std::string, std::vector<std::string>>& needs() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"beat_spectrum", {"heterodyne", "phase_noise"}},
      {"laser_waveform", {"waveform"}},
      {"laser_spectrum", {"waveform", "spectrometer"}},
      {"qd_spectrum", {"emitter", "waveform", "spectrometer"}},
      {"pulse_response", {"emitter", "waveform"}},
      {"hbt", {"emitter", "waveform", "detection", "stream"}},
      {"hom", {"emitter", "waveform", "detection", "stream", "interferometer"}},
  };
  return table;
}

const std::map<std::string, std::vector<std::string>>& seed_needs() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"beat_spectrum", {"heterodyne"}},
      {"hbt", {"trajectory", "detection", "hbt"}},
      {"hom", {"trajectory", "detection", "hbt", "hom_parallel", "hom_orthogonal"}},
  };
  return table;
}

EmitterParams parse_emitter(Section& s, bool& uses_diffusion) {
  const double lifetime = s.positive("lifetime_ns") * 1e-9;
  const double dephasing = s.non_negative("pure_dephasing_per_s", 0.0);
  const double detuning = s.num("detuning_rad_per_s", 0.0);
  const double transition = s.num("transition_freq_ghz", kDefaultTransitionFreq * 1e-9) * 1e9;
  std::optional<SpectralDiffusion> diffusion;
  const double rms = s.non_negative("diffusion_rms_rad_per_s", 0.0);
  if (rms > 0.0) {
    SpectralDiffusion d;
    d.rms_detuning = rms;
    d.correlation_time = s.positive("diffusion_correlation_time_s");
    diffusion = d;
  }
  uses_diffusion = diffusion.has_value();
  s.finish();
  try {
    return EmitterParams(1.0 / lifetime, dephasing, detuning, transition, diffusion);
  } catch (const PreconditionError& e) {
    throw ValidationError(std::string("[emitter] ") + e.what());
  }
}

WaveformSection parse_waveform(Section& s) {
  WaveformSection w;
  const std::string kind = s.str("kind");
  w.sample_rate = s.num("sample_rate_gsps", kDefaultSampleRate * 1e-9) * 1e9;
  if (!(w.sample_rate > 0.0)) throw ValidationError("[waveform] sample_rate_gsps: must be > 0");
  if (kind == "sine_am") {
    w.spec.kind = ModulationKind::sine_am;
    w.spec.mod_freq = s.positive("mod_freq_mhz") * 1e6;
    w.spec.depth = s.unit("depth", 0.0);
    w.saturation = s.positive("saturation");
    w.duration = s.positive("duration_ns") * 1e-9;
  } else if (kind == "carrier_suppressed") {
    w.spec.kind = ModulationKind::carrier_suppressed;
    w.spec.mod_freq = s.positive("mod_freq_mhz") * 1e6;
    w.saturation = s.positive("saturation");
    w.duration = s.positive("duration_ns") * 1e-9;
  } else if (kind == "pulse_train") {
    w.spec.kind = ModulationKind::pulse_train;
    w.spec.pulse_width = s.positive("pulse_width_ps") * 1e-12;
    w.spec.rep_rate = s.positive("rep_rate_mhz") * 1e6;
    w.spec.edge_time = s.non_negative("edge_time_ps", 0.0) * 1e-12;
    w.coherent_fraction = s.num("coherent_fraction");
    if (!(w.coherent_fraction > 0.0 && w.coherent_fraction < 1.0)) {
      throw ValidationError("[waveform] coherent_fraction: must lie in (0, 1)");
    }
    w.n_pulses = s.count("pulses_per_block", 3);
    if (w.n_pulses == 0) throw ValidationError("[waveform] pulses_per_block: must be > 0");
    w.duration = static_cast<double>(w.n_pulses) / w.spec.rep_rate;
  } else {
    throw ValidationError(fmt::format(
        "[waveform] kind: unknown '{}' (expected sine_am, carrier_suppressed or pulse_train)", kind));
  }
  try {
    w.spec.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError(std::string("[waveform] ") + e.what());
  }
  s.finish();
  return w;
}

DetectionChain parse_detection(Section& s) {
  DetectionChain d;
  d.efficiency = s.unit("efficiency", 1.0);
  d.background_rate = s.non_negative("background_rate_hz", 0.0);
  d.jitter_fwhm = s.non_negative("jitter_fwhm_ps", 600.0) * 1e-12;
  d.bin_width = s.num("bin_width_ps", 162.0) * 1e-12;
  if (!(d.bin_width > 0.0)) throw ValidationError("[detection] bin_width_ps: must be > 0");
  d.sideband_loss = s.unit("sideband_loss", 0.0);
  s.finish();
  return d;
}

StreamSection parse_stream(Section& s) {
  StreamSection st;
  st.blocks = s.count("blocks");
  if (st.blocks == 0) throw ValidationError("[stream] blocks: must be > 0");
  st.window = s.positive("window_ns") * 1e-9;
  s.finish();
  return st;
}

HeterodyneConfig parse_heterodyne(Section& s, Window& window) {
  HeterodyneConfig c;
  c.delta_nu = s.positive("delta_nu_khz") * 1e3;
  c.lo_amplitude = s.non_negative("lo_amplitude", 1.0);
  c.signal_amplitude = s.non_negative("signal_amplitude", 1.0);
  c.sample_rate = s.positive("sample_rate_mhz") * 1e6;
  c.acquisition_time = s.positive("acquisition_time_s");
  c.aom_freq_a = s.num("aom_a_mhz", 80.000) * 1e6;
  c.aom_freq_b = s.num("aom_b_mhz", 79.790) * 1e6;
  try {
    window = window_from_name(s.str("window", "rectangular"));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("[heterodyne] window: ") + e.what());
  }
  s.finish();
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError(std::string("[heterodyne] ") + e.what());
  }
  return c;
}

PhaseNoiseModel parse_phase_noise(Section& s, std::string& provenance) {
  PhaseNoiseModel n;
  n.random_walk_diffusion = s.non_negative("random_walk_diffusion_rad2_per_s", 0.0);
  n.common_mode_diffusion = s.non_negative("common_mode_diffusion_rad2_per_s", 0.0);
  std::vector<double> freqs, amps;
  for (const std::string& key : {std::string("sinusoid_freqs_hz"), std::string("sinusoid_amplitudes_rad")}) {
    if (!s.has(key)) continue;
    for (const std::string& item : split_list(s.str(key))) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != item.size() || pos == 0) {
        throw ValidationError(fmt::format("[phase_noise] {}: bad number '{}'", key, item));
      }
      (key == "sinusoid_freqs_hz" ? freqs : amps).push_back(v);
    }
  }
  if (freqs.size() != amps.size()) {
    throw ValidationError(fmt::format(
        "[phase_noise] sinusoid_freqs_hz has {} entries but sinusoid_amplitudes_rad has {}",
        freqs.size(), amps.size()));
  }
  for (std::size_t i = 0; i < freqs.size(); ++i) n.sinusoidal.push_back({freqs[i], amps[i]});
  provenance = s.str("provenance", "");
  s.finish();
  try {
    n.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError(std::string("[phase_noise] ") + e.what());
  }
  return n;
}

InterferometerSection parse_interferometer(Section& s) {
  InterferometerSection out;
  const double ratio = s.positive("t1_over_r1");
  const double t2 = s.unit("t2", 0.5);
  const double delay = s.positive("delay_ns") * 1e-9;
  const double p_pa = s.unit("p_pa", 1.0);
  const double p_or = s.unit("p_or", 0.0);
  out.p_pa_sigma = s.non_negative("p_pa_sigma", 0.0);
  const double mode = s.unit("mode_overlap", 1.0);
  s.finish();
  try {
    out.config = InterferometerConfig::from_ratio(ratio, t2, delay, p_pa, p_or);
    out.config.mode_overlap = mode;
  } catch (const PreconditionError& e) {
    throw ValidationError(std::string("[interferometer] ") + e.what());
  }
  return out;
}

SpectrometerSection parse_spectrometer(Section& s) {
  SpectrometerSection sp;
  sp.resolution = s.positive("resolution_mhz") * 1e6;
  sp.span = s.positive("span_mhz") * 1e6;
  s.finish();
  return sp;
}

}  // namespace

const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& kv : needs()) v.push_back(kv.first);
    return v;
  }();
  return names;
}

bool Scenario::wants(const std::string& output) const {
  return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

std::uint64_t Scenario::seed(const std::string& key) const {
  const auto it = seeds.find(key);
  if (it == seeds.end()) throw ValidationError(fmt::format("[seeds] missing seed '{}'", key));
  return it->second;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
  }
  for (const auto& [k, v] : tree) {
    if (v.empty() && !v.data().empty()) {
      throw ValidationError(fmt::format("{}: key '{}' outside any section", origin, k));
    }
  }

  Scenario sc;
  sc.origin = origin;
  auto section = [&](const std::string& name) -> const pt::ptree* {
    const auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };

  const pt::ptree* head = section("scenario");
  if (!head) throw ValidationError(origin + ": missing section [scenario]");
  {
    Section s("scenario", *head);
    sc.name = s.str("name");
    if (sc.name.empty()) throw ValidationError("[scenario] name: must not be empty");
    sc.outputs = split_list(s.str("outputs"));
    s.finish();
  }
  if (sc.outputs.empty()) throw ValidationError("[scenario] outputs: at least one output required");

  std::set<std::string> required = {"scenario"};
  std::set<std::string> required_seeds;
  for (const std::string& o : sc.outputs) {
    const auto it = needs().find(o);
    if (it == needs().end()) {
      throw ValidationError(fmt::format("[scenario] outputs: unknown output '{}' (known: {})", o,
                                        fmt::join(known_outputs(), ", ")));
    }
    required.insert(it->second.begin(), it->second.end());
    const auto st = seed_needs().find(o);
    if (st != seed_needs().end()) required_seeds.insert(st->second.begin(), st->second.end());
  }

  bool uses_diffusion = false;
  if (required.count("emitter") && section("emitter")) {
    Section s("emitter", *section("emitter"));
    sc.emitter = parse_emitter(s, uses_diffusion);
  }
  if (uses_diffusion) required_seeds.insert("diffusion");
  if (!required_seeds.empty()) required.insert("seeds");

  for (const auto& [name, body] : tree) {
    if (!required.count(name)) {
      static const std::set<std::string> all = {"scenario", "seeds", "emitter", "waveform",
                                                "detection", "stream", "heterodyne",
                                                "phase_noise", "interferometer", "spectrometer"};
      if (all.count(name)) {
        throw ValidationError(fmt::format(
            "[{}] section not used by the requested outputs ({})", name, fmt::join(sc.outputs, ", ")));
      }
      throw ValidationError(fmt::format("unknown section [{}]", name));
    }
  }
  for (const std::string& name : required) {
    if (!section(name)) {
      throw ValidationError(fmt::format("missing section [{}] needed by outputs ({})", name,
                                        fmt::join(sc.outputs, ", ")));
    }
  }

  if (const pt::ptree* t = section("seeds")) {
    Section s("seeds", *t);
    for (const std::string& key : s.keys()) {
      if (!required_seeds.count(key)) {
        throw ValidationError(fmt::format("[seeds] unknown key '{}'", key));
      }
      sc.seeds[key] = s.count(key);
    }
    for (const std::string& key : required_seeds) {
      if (!sc.seeds.count(key)) throw ValidationError(fmt::format("[seeds] missing seed '{}'", key));
    }
    s.finish();
  }
  if (uses_diffusion) {
    // The wander path draws from its own seed.
    auto d = *sc.emitter->diffusion();
    d.seed = sc.seeds.at("diffusion");
    const EmitterParams& e = *sc.emitter;
    sc.emitter.emplace(e.gamma(), e.pure_dephasing(), e.detuning_offset(), e.transition_freq(), d);
  }
  if (const pt::ptree* t = section("waveform")) {
    Section s("waveform", *t);
    sc.waveform = parse_waveform(s);
    if ((sc.wants("pulse_response") || sc.wants("hom")) &&
        sc.waveform->spec.kind != ModulationKind::pulse_train) {
      throw ValidationError("[waveform] kind: pulse_response and hom need kind = pulse_train");
    }
  }
  if (const pt::ptree* t = section("detection")) {
    Section s("detection", *t);
    sc.detection = parse_detection(s);
  }
  if (const pt::ptree* t = section("stream")) {
    Section s("stream", *t);
    sc.stream = parse_stream(s);
  }
  if (const pt::ptree* t = section("heterodyne")) {
    Section s("heterodyne", *t);
    HeterodyneSection h;
    h.config = parse_heterodyne(s, h.window);
    Section n("phase_noise", *section("phase_noise"));
    h.noise = parse_phase_noise(n, h.noise_provenance);
    sc.heterodyne = h;
  }
  if (const pt::ptree* t = section("interferometer")) {
    Section s("interferometer", *t);
    sc.interferometer = parse_interferometer(s);
  }
  if (const pt::ptree* t = section("spectrometer")) {
    Section s("spectrometer", *t);
    sc.spectrometer = parse_spectrometer(s);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open scenario {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace heitler
