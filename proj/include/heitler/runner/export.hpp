#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace heitler {

// Column-major numeric table. Column names carry their unit suffix
// (tau_s, freq_hz, ...); annotation becomes a leading "# " line.
struct Table {
  std::string name;  // file stem
  std::string annotation;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;

  void validate() const;
};

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string name;  // file stem
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Curve> curves;
};

// Fixed formatting (%.10g, "nan" for NaN) so equal inputs give equal bytes.
std::string format_csv(const Table& table);

// Writes <name>.csv and <name>.svg into out_dir (created if needed) and
// returns the paths in write order. provenance goes into each SVG.
std::vector<std::filesystem::path> export_results(const std::vector<Table>& tables,
                                                  const std::vector<Plot>& plots,
                                                  const std::string& provenance,
                                                  const std::filesystem::path& out_dir);

// Writes text to path, throwing IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace heitler
