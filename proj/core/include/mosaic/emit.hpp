#pragma once

#include <string>

#include "mosaic/sim.hpp"

namespace mosaic {

// Fixed column order, 9-significant-digit floats, '.' decimal separator, LF
// newlines. Identical traces serialize to identical bytes.
std::string trace_csv(const SimTrace& trace);
void emit_csv(const SimTrace& trace, const std::string& path);

// Summary as JSON with the same float formatting rules as the CSV.
std::string summary_json(const RunSummary& summary);
void emit_summary(const RunSummary& summary, const std::string& path);

// Standalone SVG: both lambda2 curves over steps with attack windows shaded,
// plus agent position snapshots every `stride` steps.
std::string trace_svg(const SimTrace& trace, int stride = 10);
void emit_plot(const SimTrace& trace, const std::string& path, int stride = 10);

}  // namespace mosaic
