// heitler-lab: command-line front end for the scenario runner.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

#include "heitler/common.hpp"
#include "heitler/heterodyne/linefit.hpp"
#include "heitler/photon/correlate.hpp"
#include "heitler/photon/timetag_io.hpp"
#include "heitler/runner/export.hpp"
#include "heitler/runner/run.hpp"
#include "heitler/runner/scenario.hpp"

namespace fs = std::filesystem;
using namespace heitler;

namespace {

enum Exit { kOk = 0, kInternal = 1, kValidation = 2, kPrecondition = 3, kIo = 4 };

TagFormat guess_format(const std::string& name, const fs::path& path) {
  if (!name.empty()) return tag_format_from_name(name);
  const std::string ext = path.extension().string();
  if (ext == ".csv") return TagFormat::csv;
  if (ext == ".ptt1" || ext == ".ptt") return TagFormat::ptt1;
  throw ValidationError(fmt::format("cannot tell the format of {}; pass --format", path.string()));
}

int run_one(const fs::path& scenario_path, const std::string& out_dir) {
  const Scenario sc = load_scenario(scenario_path);
  const RunResult result = run_scenario(sc);
  const fs::path dir = output_base(out_dir) / sc.name;
  const auto files = write_outputs(result, dir);
  fmt::print("{}: {} files in {}\n", sc.name, files.size(), dir.string());
  for (const auto& [name, q] : result.quantities) {
    if (q.sigma > 0.0) {
      fmt::print("  {} = {:.6g} +- {:.2g} {}\n", name, q.value, q.sigma, q.unit);
    } else {
      fmt::print("  {} = {:.6g} {}\n", name, q.value, q.unit);
    }
  }
  for (const std::string& n : result.notes) fmt::print("  note: {}\n", n);
  for (const Validation& v : result.validations) {
    if (!v.passed) fmt::print(stderr, "validation failed: {} ({})\n", v.name, v.detail);
  }
  return result.ok() ? kOk : kPrecondition;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heitler-regime resonance fluorescence lab"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario file and write its outputs");
  run->add_option("scenario", scenario_path, "scenario INI file")->required();
  run->add_option("-o,--out", out_dir, "output base directory (default: $HEITLER_LAB_OUT or heitler-out)");

  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  validate->add_option("scenario", scenario_path, "scenario INI file")->required();

  std::string tag_path, tag_format, convert_path, convert_format;
  auto* import = app.add_subcommand("import-tags", "Read a time-tag file and report its channels");
  import->add_option("file", tag_path, "PTT1 or CSV time-tag file")->required();
  import->add_option("--format", tag_format, "ptt1 or csv (default: from the extension)");
  import->add_option("--convert", convert_path, "also write the records to this file");
  import->add_option("--to", convert_format, "format of --convert (default: from its extension)");

  int chan_a = 0, chan_b = 1;
  double bin_ps = 162.0, window_ns = 20.0, period_ns = 0.0, duration_s = 0.0;
  std::string hist_out;
  auto* correlate = app.add_subcommand("correlate", "Cross-correlate two channels of a time-tag file");
  correlate->add_option("file", tag_path, "PTT1 or CSV time-tag file")->required();
  correlate->add_option("--format", tag_format, "ptt1 or csv (default: from the extension)");
  correlate->add_option("--a", chan_a, "start channel")->capture_default_str();
  correlate->add_option("--b", chan_b, "stop channel")->capture_default_str();
  correlate->add_option("--bin-ps", bin_ps, "bin width in ps")->capture_default_str();
  correlate->add_option("--window-ns", window_ns, "histogram half range in ns")->capture_default_str();
  correlate->add_option("--period-ns", period_ns, "pulse period in ns, 0 for CW")->capture_default_str();
  correlate->add_option("--duration-s", duration_s, "record length, 0 to take it from the data");
  correlate->add_option("-o,--out", hist_out, "histogram CSV (default: stdout)");

  std::string figure;
  auto* reproduce = app.add_subcommand("reproduce", "Run the bundled scenarios behind a figure");
  reproduce->add_option("figure", figure, "fig1b, fig2 or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1b", "fig2", "fig3"}));
  reproduce->add_option("-o,--out", out_dir, "output base directory");

  double target_hz = 0.299, acquisition_s = 5.0;
  std::uint64_t seed = 1;
  std::string window = "rectangular";
  auto* calibrate = app.add_subcommand("calibrate-diffusion",
                                       "Find the phase diffusion that gives a target beat FWHM");
  calibrate->add_option("--target-hz", target_hz, "target FWHM")->capture_default_str();
  calibrate->add_option("--acquisition-s", acquisition_s, "acquisition time")->capture_default_str();
  calibrate->add_option("--seed", seed, "noise seed")->capture_default_str();
  calibrate->add_option("--window", window, "rectangular or hann")->capture_default_str();

  auto* ver = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*ver) {
      fmt::print("heitler-lab {}\n", version());
      return kOk;
    }
    if (*validate) {
      const Scenario sc = load_scenario(scenario_path);
      fmt::print("{}: valid, outputs {}\n", sc.name, fmt::join(sc.outputs, ", "));
      return kOk;
    }
    if (*run) return run_one(scenario_path, out_dir);
    if (*reproduce) {
      int status = kOk;
      for (const std::string& name : figure_scenarios(figure)) {
        status = std::max(status, run_one(bundled_scenario_dir() / (name + ".ini"), out_dir));
      }
      return status;
    }
    if (*import) {
      const auto streams = import_timetags(tag_path, guess_format(tag_format, tag_path));
      for (std::size_t c = 0; c < streams.size(); ++c) {
        const PhotonStream& s = streams[c];
        if (s.empty()) {
          fmt::print("channel {}: 0 records\n", c);
        } else {
          fmt::print("channel {}: {} records, {} .. {} ps\n", c, s.size(), s.front().timestamp_ps,
                     s.back().timestamp_ps);
        }
      }
      if (!convert_path.empty()) {
        export_timetags(convert_path, streams, guess_format(convert_format, convert_path));
        fmt::print("wrote {}\n", convert_path);
      }
      return kOk;
    }
    if (*correlate) {
      const auto streams = import_timetags(tag_path, guess_format(tag_format, tag_path));
      auto channel = [&](int c) -> const PhotonStream& {
        if (c < 0 || static_cast<std::size_t>(c) >= streams.size()) {
          throw ValidationError(fmt::format("channel {} not present ({} channels)", c, streams.size()));
        }
        return streams[static_cast<std::size_t>(c)];
      };
      const CoincidenceHistogram h = correlate_g2(channel(chan_a), channel(chan_b), bin_ps * 1e-12,
                                                  window_ns * 1e-9, duration_s, period_ns * 1e-9);
      const Table t{"correlation",
                    fmt::format("channels {} -> {}, bin_width_s={:.6g}, expectation per bin={:.6g}",
                                chan_a, chan_b, h.bin_width, h.expectation),
                    {"tau_s", "counts", "normalized"},
                    {h.tau, h.counts, h.normalized}};
      const std::string csv = format_csv(t);
      if (hist_out.empty()) {
        std::cout << csv;
      } else {
        write_text_file(hist_out, csv);
        fmt::print("wrote {}\n", hist_out);
      }
      return kOk;
    }
    if (*calibrate) {
      HeterodyneConfig cfg;
      cfg.acquisition_time = acquisition_s;
      const DiffusionCalibration c =
          calibrate_diffusion(cfg, PhaseNoiseModel{}, target_hz, seed, window_from_name(window));
      fmt::print("random_walk_diffusion_rad2_per_s = {:.6g}\nfwhm_hz = {:.6g}\niterations = {}\n",
                 c.diffusion, c.fwhm, c.iterations);
      return kOk;
    }
  } catch (const ValidationError& e) {
    fmt::print(stderr, "validation error: {}\n", e.what());
    return kValidation;
  } catch (const PreconditionError& e) {
    fmt::print(stderr, "precondition failed: {}\n", e.what());
    return kPrecondition;
  } catch (const IoError& e) {
    fmt::print(stderr, "io error: {}\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInternal;
  }
  return kOk;
}
