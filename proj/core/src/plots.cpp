#include "polar/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polar {

namespace {

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c); break;
    }
  }
  return out;
}

void write_svg(const std::string& svg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + path.string());
  }
  out << svg;
}

}  // namespace

std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars, double y_min,
                          double y_max) {
  constexpr double kMarginLeft = 56.0;
  constexpr double kMarginRight = 16.0;
  constexpr double kMarginTop = 40.0;
  constexpr double kMarginBottom = 72.0;
  constexpr double kBarSlot = 56.0;
  constexpr double kPlotHeight = 240.0;

  const std::size_t n = bars.size();
  const double plot_width = std::max<double>(kBarSlot * static_cast<double>(n), kBarSlot);
  const double width = kMarginLeft + plot_width + kMarginRight;
  const double height = kMarginTop + kPlotHeight + kMarginBottom;
  const double span = y_max - y_min;

  auto y_of = [&](double v) {
    return kMarginTop + kPlotHeight * (1.0 - (v - y_min) / span);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << fmt(width / 2.0)
      << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";

  // horizontal gridlines at quarter intervals
  for (int i = 0; i <= 4; ++i) {
    const double v = y_min + span * static_cast<double>(i) / 4.0;
    const double y = y_of(v);
    svg << "  <line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(kMarginLeft + plot_width) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "  <text x=\"" << fmt(kMarginLeft - 6.0) << "\" y=\"" << fmt(y + 4.0)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v)
        << "</text>\n";
  }

  const double zero = std::clamp(0.0, y_min, y_max);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = bars[i].second;
    const double x = kMarginLeft + kBarSlot * static_cast<double>(i) + kBarSlot * 0.15;
    const double bar_width = kBarSlot * 0.7;
    const double y_top = y_of(std::max(v, zero));
    const double y_bottom = y_of(std::min(v, zero));
    const char* color = v < 0.0 ? "#c44e52" : "#4878a8";
    svg << "  <rect x=\"" << fmt(x) << "\" y=\"" << fmt(y_top) << "\" width=\"" << fmt(bar_width)
        << "\" height=\"" << fmt(std::max(y_bottom - y_top, 0.5)) << "\" fill=\"" << color
        << "\"/>\n";
    svg << "  <text x=\"" << fmt(x + bar_width / 2.0) << "\" y=\"" << fmt(y_top - 4.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt(v, "%.3f") << "</text>\n";
    const double label_x = x + bar_width / 2.0;
    const double label_y = kMarginTop + kPlotHeight + 14.0;
    svg << "  <text x=\"" << fmt(label_x) << "\" y=\"" << fmt(label_y)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" transform=\"rotate(-35 "
        << fmt(label_x) << " " << fmt(label_y) << ")\">" << xml_escape(bars[i].first)
        << "</text>\n";
  }

  // axis line at zero
  svg << "  <line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(y_of(zero)) << "\" x2=\""
      << fmt(kMarginLeft + plot_width) << "\" y2=\"" << fmt(y_of(zero))
      << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_f1_chart(const EvalReport& report, const std::filesystem::path& path) {
  std::vector<std::pair<std::string, double>> bars;
  bars.reserve(report.labels.size());
  for (const auto& s : report.labels) {
    bars.emplace_back(s.label, s.f1);
  }
  write_svg(bar_chart_svg("Per-label F1", bars, 0.0, 1.0), path);
}

void write_pr_gap_chart(const EvalReport& report, const std::filesystem::path& path) {
  std::vector<std::pair<std::string, double>> bars;
  bars.reserve(report.labels.size());
  for (const auto& s : report.labels) {
    bars.emplace_back(s.label, s.pr_gap());
  }
  write_svg(bar_chart_svg("Per-label recall-precision gap", bars, -1.0, 1.0), path);
}

void write_language_chart(const PerLanguageReports& reports, const std::filesystem::path& path) {
  std::vector<std::pair<std::string, double>> bars;
  bars.reserve(reports.by_language.size());
  for (const auto& [lang, report] : reports.by_language) {
    bars.emplace_back(std::string(to_string(lang)), report.macro);
  }
  write_svg(bar_chart_svg("Macro-F1 by language", bars, 0.0, 1.0), path);
}

}  // namespace polar
