#include "heitler/runner/export.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>

#include "heitler/common.hpp"
#include "heitler/runner/svg.hpp"

namespace heitler {

namespace fs = std::filesystem;

void Table::validate() const {
  if (name.empty()) throw PreconditionError("table without a name");
  if (columns.size() != data.size()) {
    throw PreconditionError(fmt::format("table {}: {} column names for {} columns", name,
                                        columns.size(), data.size()));
  }
  for (const auto& col : data) {
    if (col.size() != data.front().size()) {
      throw PreconditionError(fmt::format("table {}: ragged columns", name));
    }
  }
}

std::string format_csv(const Table& table) {
  table.validate();
  std::string out;
  if (!table.annotation.empty()) out += "# " + table.annotation + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  const std::size_t rows = table.data.empty() ? 0 : table.data.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.data.size(); ++c) {
      if (c) out += ',';
      const double v = table.data[c][r];
      out += std::isnan(v) ? std::string("nan") : fmt::format("{:.10g}", v);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

std::vector<fs::path> export_results(const std::vector<Table>& tables,
                                     const std::vector<Plot>& plots,
                                     const std::string& provenance, const fs::path& out_dir) {
  std::vector<fs::path> written;
  if (tables.empty() && plots.empty()) return written;
  // Render everything first; a formatting error leaves the directory alone.
  std::vector<std::pair<fs::path, std::string>> files;
  for (const Table& t : tables) files.emplace_back(out_dir / (t.name + ".csv"), format_csv(t));
  for (const Plot& p : plots) files.emplace_back(out_dir / (p.name + ".svg"), render_svg(p, provenance));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
  for (const auto& [path, text] : files) {
    write_text_file(path, text);
    written.push_back(path);
  }
  return written;
}

}  // namespace heitler
