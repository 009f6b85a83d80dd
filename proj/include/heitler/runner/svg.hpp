#pragma once

#include <string>

#include "heitler/runner/export.hpp"

namespace heitler {

// Static line plot: frame, ticks, axis labels, legend and one <polyline>
// per curve; NaN points are skipped. provenance is embedded as an XML
// comment.
std::string render_svg(const Plot& plot, const std::string& provenance);

}  // namespace heitler
