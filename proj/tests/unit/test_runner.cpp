#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "heitler/common.hpp"
#include "heitler/runner/export.hpp"
#include "heitler/runner/run.hpp"
#include "heitler/runner/scenario.hpp"
#include "heitler/runner/svg.hpp"

using namespace heitler;
namespace fs = std::filesystem;

namespace {

const std::string kSpectra = R"(
[scenario]
name = am
outputs = qd_spectrum

[emitter]
lifetime_ns = 0.65

[waveform]
kind = sine_am
mod_freq_mhz = 200
depth = 0.8
saturation = 0.01
duration_ns = 100

[spectrometer]
resolution_mhz = 20
span_mhz = 600
)";

const std::string kPulsed = R"(
[scenario]
name = pulsed
outputs = hbt, hom, pulse_response

[emitter]
lifetime_ns = 0.65

[waveform]
kind = pulse_train
pulse_width_ps = 500
rep_rate_mhz = 300
coherent_fraction = 0.9

[detection]
efficiency = 1

[stream]
blocks = 20000
window_ns = 16.7

[interferometer]
t1_over_r1 = 1.3
t2 = 0.41
delay_ns = 3.33
p_pa = 0.97
p_or = 0.05

[seeds]
trajectory = 1
detection = 2
hbt = 3
hom_parallel = 4
hom_orthogonal = 5
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Replaces the first occurrence of from.
std::string edit(std::string s, const std::string& from, const std::string& to) {
  const auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  return s.replace(p, from.size(), to);
}

void expect_invalid(const std::string& text, const std::string& fragment) {
  try {
    parse_scenario(text);
    FAIL("accepted: " << fragment);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CAPTURE(what);
    CHECK(what.find(fragment) != std::string::npos);
  }
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", HEITLER_LAB_BIN, args, log.string());
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario sc = parse_scenario(kSpectra);
  CHECK(sc.name == "am");
  CHECK(sc.wants("qd_spectrum"));
  CHECK(!sc.wants("hbt"));
  CHECK(sc.emitter->t1_lifetime() == doctest::Approx(0.65e-9));
  CHECK(sc.waveform->spec.mod_freq == 200e6);
  CHECK(sc.spectrometer->resolution == 20e6);
  CHECK_THROWS_AS(sc.seed("trajectory"), ValidationError);

  const Scenario p = parse_scenario(kPulsed);
  CHECK(p.seed("hom_parallel") == 4);
  CHECK(p.interferometer->config.t1 / p.interferometer->config.r1 == doctest::Approx(1.3));
  CHECK(p.stream->window == doctest::Approx(16.7e-9));
  CHECK(p.detection->jitter_fwhm == doctest::Approx(600e-12));
}

TEST_CASE("scenario schema is strict") {
  expect_invalid(edit(kSpectra, "depth = 0.8", "depht = 0.8"), "depht");
  expect_invalid(kSpectra + "\n[extras]\nx = 1\n", "unknown section [extras]");
  expect_invalid(kSpectra + "\n[detection]\nefficiency = 1\n", "[detection] section not used");
  expect_invalid(edit(kSpectra, "[spectrometer]", "[spectrometer_]"), "");
  expect_invalid(edit(kPulsed, "hbt = 3\n", ""), "missing seed 'hbt'");
  expect_invalid(kPulsed + "extra = 9\n", "[seeds] unknown key 'extra'");
  expect_invalid(edit(kSpectra, "depth = 0.8", "depth = lots"), "expected a finite number");
  expect_invalid(edit(kSpectra, "depth = 0.8", "depth = 1.8"), "depth");
  expect_invalid(edit(kSpectra, "outputs = qd_spectrum", "outputs = qd_spectra"), "unknown output");
  expect_invalid(edit(kSpectra, "outputs = qd_spectrum", "outputs = "), "at least one output");
  expect_invalid(edit(kSpectra, "kind = sine_am", "kind = chirp"), "kind");
  expect_invalid(edit(kSpectra, "outputs = qd_spectrum", "outputs = qd_spectrum, pulse_response"),
                 "pulse_train");
  expect_invalid(edit(kPulsed, "coherent_fraction = 0.9", "coherent_fraction = 1.0"),
                 "coherent_fraction");
  expect_invalid(edit(kPulsed, "t2 = 0.41", "t2 = 1.41"), "t2");
  expect_invalid("stray = 1\n" + kSpectra, "outside any section");
  expect_invalid(edit(kSpectra, "[emitter]\nlifetime_ns = 0.65",
                      "[emitter]\nlifetime_ns = 0.65\ndiffusion_rms_rad_per_s = 1e8\n"
                      "diffusion_correlation_time_s = 1e-6"),
                 "[seeds]");
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.ini"), IoError);
}

TEST_CASE("bundled scenarios validate") {
  for (const char* fig : {"fig1b", "fig2", "fig3"}) {
    for (const std::string& name : figure_scenarios(fig)) {
      const Scenario sc = load_scenario(bundled_scenario_dir() / (name + ".ini"));
      CHECK(sc.name == name);
    }
  }
  CHECK(figure_scenarios("fig2") == std::vector<std::string>{"fig2a", "fig2c"});
  CHECK_THROWS_AS(figure_scenarios("fig4"), ValidationError);
  CHECK(std::string(version()).size() > 0);
}

TEST_CASE("csv formatting") {
  const Table t{"psd", "note", {"freq_hz", "power"}, {{1.0, 2.5e-12}, {0.1, std::nan("")}}};
  CHECK(format_csv(t) == "# note\nfreq_hz,power\n1,0.1\n2.5e-12,nan\n");
  const Table ragged{"r", "", {"a", "b"}, {{1.0}, {1.0, 2.0}}};
  CHECK_THROWS_AS(format_csv(ragged), PreconditionError);
  const Table names{"n", "", {"a"}, {{1.0}, {2.0}}};
  CHECK_THROWS_AS(format_csv(names), PreconditionError);
}

TEST_CASE("svg has one polyline per curve") {
  Plot p{"p", "T & <title>", "x", "y",
         {{"a", {0, 1, 2}, {0, 1, 4}}, {"b", {0, 1, 2}, {1, std::nan(""), 3}}, {"c", {}, {}}}};
  const std::string svg = render_svg(p, "run --seed 4");
  std::size_t n = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++n;
  CHECK(n == 3);
  CHECK(svg.find("T &amp; &lt;title&gt;") != std::string::npos);
  CHECK(svg.find("--seed") == std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.rfind("</svg>") != std::string::npos);
}

TEST_CASE("export writes files and reports IO failures") {
  TempDir dir("heitler_export_test");
  const Table t{"psd", "", {"a"}, {{1.0}}};
  const Plot p{"psd", "", "x", "y", {{"a", {0, 1}, {0, 1}}}};
  const auto files = export_results({t}, {p}, "prov", dir.path / "sub");
  REQUIRE(files.size() == 2);
  CHECK(slurp(files[0]) == "a\n1\n");
  write_text_file(dir.path / "blocker", "x");
  CHECK_THROWS_AS(export_results({t}, {p}, "prov", dir.path / "blocker" / "out"), IoError);
  CHECK_THROWS_AS(write_text_file(dir.path / "missing" / "f.txt", "x"), IoError);
}

TEST_CASE("output directory precedence") {
  const char* saved = std::getenv("HEITLER_LAB_OUT");
  const std::string keep = saved ? saved : "";
  setenv("HEITLER_LAB_OUT", "/tmp/from-env", 1);
  CHECK(output_base("") == fs::path("/tmp/from-env"));
  CHECK(output_base("explicit") == fs::path("explicit"));
  unsetenv("HEITLER_LAB_OUT");
  CHECK(output_base("") == fs::path("heitler-out"));
  if (saved) setenv("HEITLER_LAB_OUT", keep.c_str(), 1);
}

TEST_CASE("spectra run and summary") {
  const RunResult r = run_scenario(parse_scenario(kSpectra));
  CHECK(r.ok());
  CHECK(r.quantities.at("sideband_weight").value == doctest::Approx(0.27).epsilon(0.03 / 0.27));
  CHECK(r.quantities.at("qd_sideband_offset_hz").value == doctest::Approx(200e6));
  const auto j = nlohmann::json::parse(r.summary_json({"qd_spectrum.csv"}));
  CHECK(j["scenario"] == "am");
  CHECK(j["status"] == "ok");
  CHECK(j["files"][0] == "qd_spectrum.csv");
  CHECK(j["quantities"]["lorentzian_weight"]["value"].get<double>() == doctest::Approx(0.2726).epsilon(1e-3));
  CHECK(r.summary_json({}) == r.summary_json({}));
}

TEST_CASE("saturating drive is refused") {
  CHECK_THROWS_AS(run_scenario(parse_scenario(edit(kSpectra, "saturation = 0.01", "saturation = 0.15"))),
                  PreconditionError);
}

TEST_CASE("pulsed run is reproducible byte for byte") {
  TempDir dir("heitler_run_test");
  const Scenario sc = parse_scenario(kPulsed);
  const auto a = write_outputs(run_scenario(sc), dir.path / "a");
  const auto b = write_outputs(run_scenario(sc), dir.path / "b");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(a[i].string());
    CHECK(a[i].filename() == b[i].filename());
    CHECK(slurp(a[i]) == slurp(b[i]));
  }
  CHECK(fs::exists(dir.path / "a" / "hbt.csv"));
  CHECK(fs::exists(dir.path / "a" / "hom_difference.csv"));
  CHECK(fs::exists(dir.path / "a" / "summary.json"));
  const auto j = nlohmann::json::parse(slurp(dir.path / "a" / "summary.json"));
  CHECK(j["quantities"].contains("c_hom_raw"));
  CHECK(j["quantities"].contains("g2_zero_area_ratio"));
  const double raw = j["quantities"]["c_hom_raw"]["value"];
  CHECK(j["quantities"]["c_hom_corrected_polarization"]["value"].get<double>() == raw / 0.97);
}

TEST_CASE("command line exit codes") {
  TempDir dir("heitler_cli_test");
  const fs::path log = dir.path / "log.txt";
  CHECK(run_cli("version", log) == 0);
  CHECK(slurp(log).find("heitler-lab") != std::string::npos);
  CHECK(run_cli("", log) == 2);
  CHECK(run_cli("frobnicate", log) == 2);
  CHECK(run_cli("reproduce fig9", log) == 2);

  std::ofstream(dir.path / "good.ini") << kSpectra;
  std::ofstream(dir.path / "bad.ini") << edit(kSpectra, "depth", "dpth");
  std::ofstream(dir.path / "hot.ini") << edit(kSpectra, "saturation = 0.01", "saturation = 0.15");
  CHECK(run_cli(fmt::format("validate \"{}\"", (dir.path / "good.ini").string()), log) == 0);
  CHECK(run_cli(fmt::format("validate \"{}\"", (dir.path / "bad.ini").string()), log) == 2);
  CHECK(slurp(log).find("dpth") != std::string::npos);
  CHECK(run_cli(fmt::format("validate \"{}\"", (dir.path / "none.ini").string()), log) == 4);
  CHECK(run_cli(fmt::format("run \"{}\" -o \"{}\"", (dir.path / "good.ini").string(),
                            (dir.path / "out").string()),
                log) == 0);
  CHECK(fs::exists(dir.path / "out" / "am" / "qd_spectrum.csv"));
  CHECK(fs::exists(dir.path / "out" / "am" / "qd_spectrum.svg"));
  CHECK(run_cli(fmt::format("run \"{}\" -o \"{}\"", (dir.path / "hot.ini").string(),
                            (dir.path / "out").string()),
                log) == 3);
  std::ofstream(dir.path / "blocker") << "x";
  CHECK(run_cli(fmt::format("run \"{}\" -o \"{}\"", (dir.path / "good.ini").string(),
                            (dir.path / "blocker").string()),
                log) == 4);

  std::ofstream(dir.path / "tags.csv") << "timestamp_ps,channel\n0,0\n1000,1\n5000,0\n5600,1\n";
  CHECK(run_cli(fmt::format("import-tags \"{}\"", (dir.path / "tags.csv").string()), log) == 0);
  CHECK(slurp(log).find("channel 1: 2 records") != std::string::npos);
  CHECK(run_cli(fmt::format("import-tags \"{}\" --convert \"{}\"", (dir.path / "tags.csv").string(),
                            (dir.path / "tags.ptt1").string()),
                log) == 0);
  CHECK(run_cli(fmt::format("correlate \"{}\" --bin-ps 100 --window-ns 2 -o \"{}\"",
                            (dir.path / "tags.ptt1").string(), (dir.path / "h.csv").string()),
                log) == 0);
  CHECK(slurp(dir.path / "h.csv").find("tau_s,counts,normalized") != std::string::npos);
  CHECK(run_cli(fmt::format("correlate \"{}\" --b 5", (dir.path / "tags.csv").string()), log) == 2);
  std::ofstream(dir.path / "one.csv") << "timestamp_ps,channel\n0,0\n";
  std::ofstream(dir.path / "two.csv") << "timestamp_ps,channel\n0,0\n10,0\n";
  CHECK(run_cli(fmt::format("correlate \"{}\" --a 0 --b 0", (dir.path / "one.csv").string()), log) == 3);
  std::ofstream(dir.path / "junk.ptt1") << "not a tag file";
  CHECK(run_cli(fmt::format("import-tags \"{}\"", (dir.path / "junk.ptt1").string()), log) == 4);
  CHECK(run_cli(fmt::format("import-tags \"{}\"", (dir.path / "tags.txt").string()), log) == 2);
}
