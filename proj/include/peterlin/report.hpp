#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "peterlin/study.hpp"

namespace peterlin {

inline constexpr const char* kCsvHeader = "N,h,dt,nu,eps,Er1,Er2,Er3,Er4,Er5,Er6,newton_avg_iters,wall_seconds";

/// Emits the leading convention comment, the header and one row per level;
/// floats carry 17 significant digits.
void write_csv(std::ostream& out, double nu, double eps, const std::vector<LevelResult>& levels);

/// One data row (newline-terminated) of the schema above.
std::string csv_row(double nu, double eps, const LevelResult& level);

/// Parsed CSV content (the nu/eps columns ride along in each level).
struct CsvData {
    std::vector<LevelResult> levels;
    double nu = 0.0;
    double eps = 0.0;
};

/// Strict reader for write_csv output; errors name the offending line.
CsvData read_csv(std::istream& in);

/// Aligned error/slope table, one row per level with slope rows in between.
std::string format_table(const std::vector<LevelResult>& levels);

/// Deterministic log-log SVG of Er1..Er6 versus h with a slope-1 reference
/// triangle; identical input yields identical bytes.
std::string render_plot_svg(const CsvData& data);

}  // namespace peterlin
