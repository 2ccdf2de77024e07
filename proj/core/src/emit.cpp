#include "mosaic/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mosaic/format.hpp"

namespace mosaic {
namespace {

void require_nonempty(const SimTrace& trace) {
  if (trace.steps.empty()) throw std::invalid_argument("empty trace");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

const char* status_label(const AgentRecord& ar) {
  return ar.present ? to_string(ar.status) : "absent";
}

const char* window_fill(AttackKind kind) {
  switch (kind) {
    case AttackKind::Jam: return "#d4654a";
    case AttackKind::Spoof: return "#8458b3";
    case AttackKind::NodeLoss: return "#b3a04a";
  }
  return "#888888";
}

const char* status_fill(const AgentRecord& ar) {
  if (!ar.present) return "none";
  switch (ar.status) {
    case AgentStatus::Active: return "#2d7f5e";
    case AgentStatus::Quarantined: return "#9a9a9a";
    case AgentStatus::Spoofed: return "#c23b3b";
  }
  return "#888888";
}

}  // namespace

std::string trace_csv(const SimTrace& trace) {
  require_nonempty(trace);
  std::string out;
  out += "step,lambda2_true,lambda2_perceived,jam_links_removed,spoof_active,"
         "quarantined_count,gne_rounds,gne_converged,lambda_floor_violation";
  for (int id : trace.roster) {
    const std::string tag = "agent" + std::to_string(id);
    out += "," + tag + "_x," + tag + "_y," + tag + "_status";
  }
  out += "\n";

  for (const StepRecord& rec : trace.steps) {
    out += std::to_string(rec.step);
    out += "," + fmt_g9(rec.lambda2_true);
    out += "," + fmt_g9(rec.lambda2_perceived);
    out += "," + std::to_string(rec.jam_links_removed);
    out += "," + std::to_string(rec.spoof_active);
    out += "," + std::to_string(rec.quarantined_count);
    out += "," + std::to_string(rec.gne_rounds);
    out += rec.gne_converged ? ",1" : ",0";
    out += rec.lambda_floor_violation ? ",1" : ",0";
    for (const AgentRecord& ar : rec.agents) {
      out += "," + fmt_g9(ar.position.x());
      out += "," + fmt_g9(ar.position.y());
      out += ",";
      out += status_label(ar);
    }
    out += "\n";
  }
  return out;
}

void emit_csv(const SimTrace& trace, const std::string& path) {
  write_file(path, trace_csv(trace));
}

std::string summary_json(const RunSummary& summary) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"name\": \"" << json_escape(summary.name) << "\",\n";
  out << "  \"total_steps\": " << summary.total_steps << ",\n";
  out << "  \"final_lambda2_true\": " << fmt_g9(summary.final_lambda2_true) << ",\n";
  out << "  \"min_lambda2_true\": " << fmt_g9(summary.min_lambda2_true) << ",\n";
  out << "  \"mean_lambda2_true\": " << fmt_g9(summary.mean_lambda2_true) << ",\n";
  out << "  \"steps_disconnected\": " << summary.steps_disconnected << ",\n";
  out << "  \"floor_violations\": " << summary.floor_violations << ",\n";
  out << "  \"attacks\": [";
  for (size_t i = 0; i < summary.attacks.size(); ++i) {
    const AttackOutcome& a = summary.attacks[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\"kind\": \"" << to_string(a.kind) << "\", \"start_step\": "
        << a.start_step << ", \"end_step\": " << a.end_step
        << ", \"pre_lambda2\": "
        << (a.pre_lambda2 ? fmt_g9(*a.pre_lambda2) : "null")
        << ", \"recovery_steps\": "
        << (a.recovery_steps ? std::to_string(*a.recovery_steps) : "null")
        << ", \"recovered\": " << (a.recovered ? "true" : "false") << "}";
  }
  out << (summary.attacks.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

void emit_summary(const RunSummary& summary, const std::string& path) {
  write_file(path, summary_json(summary));
}

std::string trace_svg(const SimTrace& trace, int stride) {
  require_nonempty(trace);
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");

  const int steps = static_cast<int>(trace.steps.size());
  const double left = 56.0, top = 32.0, plot_w = 800.0, plot_h = 280.0;

  double y_max = 1e-9;
  for (const StepRecord& rec : trace.steps)
    y_max = std::max({y_max, rec.lambda2_true, rec.lambda2_perceived});
  y_max *= 1.08;

  const auto sx = [&](double step) {
    return steps > 1 ? left + plot_w * step / (steps - 1) : left + plot_w / 2.0;
  };
  const auto sy = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

  // Thumbnail layout: snapshot steps at the stride, last step always shown.
  std::vector<int> snaps;
  for (int s = 0; s < steps; s += stride) snaps.push_back(s);
  if (snaps.back() != steps - 1) snaps.push_back(steps - 1);
  const double thumb = 92.0, thumb_pad = 10.0;
  const int per_row = std::max(1, static_cast<int>((plot_w + left) / (thumb + thumb_pad)));
  const int rows = (static_cast<int>(snaps.size()) + per_row - 1) / per_row;
  const double thumbs_top = top + plot_h + 64.0;
  const double height = thumbs_top + rows * (thumb + 26.0) + 8.0;
  const double width = left + plot_w + 24.0;

  // Shared world box across thumbnails so motion is visible between frames.
  double wx0 = std::numeric_limits<double>::infinity(), wy0 = wx0;
  double wx1 = -wx0, wy1 = -wx0;
  for (const StepRecord& rec : trace.steps) {
    for (const AgentRecord& ar : rec.agents) {
      if (!ar.present) continue;
      wx0 = std::min(wx0, ar.position.x());
      wx1 = std::max(wx1, ar.position.x());
      wy0 = std::min(wy0, ar.position.y());
      wy1 = std::max(wy1, ar.position.y());
    }
  }
  const double span = std::max({wx1 - wx0, wy1 - wy0, 1e-9});
  const double pad = 0.06 * span;
  wx0 -= pad; wy0 -= pad;
  const double world = span + 2.0 * pad;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_g9(width)
      << "\" height=\"" << fmt_g9(height) << "\" viewBox=\"0 0 "
      << fmt_g9(width) << " " << fmt_g9(height) << "\">\n";
  svg << "<style>text{font-family:Helvetica,Arial,sans-serif;font-size:11px;"
         "fill:#333}</style>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << fmt_g9(left) << "\" y=\"20\" font-size=\"14\">"
      << xml_escape(trace.name.empty() ? "trace" : trace.name)
      << ": algebraic connectivity</text>\n";

  for (const AttackWindow& w : trace.attacks) {
    const double x0 = sx(w.start_step);
    const double x1 = sx(std::min(w.end_step, steps) - 1 + 1e-9);
    svg << "<rect x=\"" << fmt_g9(x0) << "\" y=\"" << fmt_g9(top) << "\" width=\""
        << fmt_g9(std::max(x1 - x0, 1.0)) << "\" height=\"" << fmt_g9(plot_h)
        << "\" fill=\"" << window_fill(w.kind) << "\" fill-opacity=\"0.15\"/>\n";
  }

  svg << "<line x1=\"" << fmt_g9(left) << "\" y1=\"" << fmt_g9(top) << "\" x2=\""
      << fmt_g9(left) << "\" y2=\"" << fmt_g9(top + plot_h)
      << "\" stroke=\"#444\"/>\n";
  svg << "<line x1=\"" << fmt_g9(left) << "\" y1=\"" << fmt_g9(top + plot_h)
      << "\" x2=\"" << fmt_g9(left + plot_w) << "\" y2=\"" << fmt_g9(top + plot_h)
      << "\" stroke=\"#444\"/>\n";
  svg << "<text x=\"6\" y=\"" << fmt_g9(top + 6.0) << "\">" << fmt_g9(y_max)
      << "</text>\n";
  svg << "<text x=\"6\" y=\"" << fmt_g9(top + plot_h) << "\">0</text>\n";
  svg << "<text x=\"" << fmt_g9(left) << "\" y=\"" << fmt_g9(top + plot_h + 16.0)
      << "\">step 0</text>\n";
  svg << "<text x=\"" << fmt_g9(left + plot_w - 40.0) << "\" y=\""
      << fmt_g9(top + plot_h + 16.0) << "\">" << (steps - 1) << "</text>\n";

  const auto polyline = [&](bool perceived, const char* color, const char* dash) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (dash[0] != '\0') svg << " stroke-dasharray=\"" << dash << "\"";
    svg << " points=\"";
    for (const StepRecord& rec : trace.steps)
      svg << fmt_g9(sx(rec.step)) << ","
          << fmt_g9(sy(perceived ? rec.lambda2_perceived : rec.lambda2_true)) << " ";
    svg << "\"/>\n";
  };
  polyline(false, "#1d6fa5", "");
  polyline(true, "#c2703b", "5,3");

  svg << "<text x=\"" << fmt_g9(left + 8.0) << "\" y=\"" << fmt_g9(top + plot_h + 34.0)
      << "\" fill=\"#1d6fa5\">true lambda2</text>\n";
  svg << "<text x=\"" << fmt_g9(left + 110.0) << "\" y=\""
      << fmt_g9(top + plot_h + 34.0) << "\" fill=\"#c2703b\">perceived lambda2"
      << "</text>\n";
  double legend_x = left + 240.0;
  for (const AttackWindow& w : trace.attacks) {
    svg << "<rect x=\"" << fmt_g9(legend_x) << "\" y=\""
        << fmt_g9(top + plot_h + 25.0) << "\" width=\"10\" height=\"10\" fill=\""
        << window_fill(w.kind) << "\" fill-opacity=\"0.4\"/>\n";
    svg << "<text x=\"" << fmt_g9(legend_x + 14.0) << "\" y=\""
        << fmt_g9(top + plot_h + 34.0) << "\">" << to_string(w.kind) << " ["
        << w.start_step << "," << w.end_step << ")</text>\n";
    legend_x += 120.0;
  }

  for (size_t i = 0; i < snaps.size(); ++i) {
    const StepRecord& rec = trace.steps[snaps[i]];
    const double tx = left + (i % per_row) * (thumb + thumb_pad);
    const double ty = thumbs_top + (i / per_row) * (thumb + 26.0);
    svg << "<g transform=\"translate(" << fmt_g9(tx) << "," << fmt_g9(ty)
        << ")\">\n";
    svg << "<rect width=\"" << fmt_g9(thumb) << "\" height=\"" << fmt_g9(thumb)
        << "\" fill=\"#fafafa\" stroke=\"#bbb\"/>\n";
    for (const AgentRecord& ar : rec.agents) {
      if (!ar.present) continue;
      const double px = (ar.position.x() - wx0) / world * thumb;
      const double py = thumb - (ar.position.y() - wy0) / world * thumb;
      svg << "<circle cx=\"" << fmt_g9(px) << "\" cy=\"" << fmt_g9(py)
          << "\" r=\"3\" fill=\"" << status_fill(ar) << "\"/>\n";
    }
    svg << "<text x=\"2\" y=\"" << fmt_g9(thumb + 14.0) << "\">step " << rec.step
        << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const SimTrace& trace, const std::string& path, int stride) {
  write_file(path, trace_svg(trace, stride));
}

}  // namespace mosaic
