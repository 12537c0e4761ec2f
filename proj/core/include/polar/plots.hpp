#ifndef POLAR_PLOTS_HPP
#define POLAR_PLOTS_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "polar/eval.hpp"

namespace polar {

/// Standalone SVG bar chart. Layout and number formatting are fixed and the
/// output carries no timestamps, so identical inputs give identical bytes.
std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars, double y_min,
                          double y_max);

/// Per-label F1 bars.
void write_f1_chart(const EvalReport& report, const std::filesystem::path& path);

/// Per-label recall-precision gap bars (positive = recall-dominant).
void write_pr_gap_chart(const EvalReport& report, const std::filesystem::path& path);

/// Per-language macro-F1 bars.
void write_language_chart(const PerLanguageReports& reports, const std::filesystem::path& path);

}  // namespace polar

#endif  // POLAR_PLOTS_HPP
