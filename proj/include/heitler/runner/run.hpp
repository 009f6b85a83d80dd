#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "heitler/runner/export.hpp"
#include "heitler/runner/scenario.hpp"

namespace heitler {

struct Quantity {
  double value = 0.0;
  double sigma = 0.0;  // 0 when not estimated
  std::string unit;
};

struct Validation {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Everything a run produces, held in memory until written.
struct RunResult {
  std::string scenario;
  std::vector<Table> tables;
  std::vector<Plot> plots;
  std::map<std::string, Quantity> quantities;
  std::vector<Validation> validations;
  std::vector<std::string> notes;

  bool ok() const;
  // Deterministic JSON: no clock, no absolute paths.
  std::string summary_json(const std::vector<std::string>& files) const;
};

RunResult run_scenario(const Scenario& scenario);

// CSVs, SVGs and summary.json into out_dir. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const RunResult& result,
                                                 const std::filesystem::path& out_dir);

// Base output directory: explicit argument, else HEITLER_LAB_OUT, else
// "heitler-out". Each run writes into <base>/<scenario name>.
std::filesystem::path output_base(const std::string& explicit_dir);

// Bundled scenario files, and the scenario names behind a figure target
// (fig2 expands to fig2a and fig2c).
std::filesystem::path bundled_scenario_dir();
std::vector<std::string> figure_scenarios(const std::string& figure);

const char* version();

}  // namespace heitler
