#pragma once

// CSV and SVG emitters. CSV floats use 17 significant digits so a parsed
// file reproduces the in-memory doubles exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace insider::report {

std::string format_double(double x);
double parse_double(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws Error(InvalidArgument) if absent.
    std::size_t column(std::string_view name) const;
};

void write_csv(const std::filesystem::path& file, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& file);

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
};

/// Self-contained line chart, 800x600 viewBox, series colors fixed by position.
/// Non-finite points are skipped.
std::string render_svg(const Chart& chart);
void write_text(const std::filesystem::path& file, std::string_view text);

}  // namespace insider::report
