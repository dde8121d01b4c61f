#include "insider/report.hpp"

#include "insider/core.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace insider::report {

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return buf.data();
}

double parse_double(std::string_view text)
{
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::size_t CsvTable::column(std::string_view name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorCode::InvalidArgument, "missing CSV column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

void write_csv(const std::filesystem::path& file, const CsvTable& table)
{
    std::ofstream os(file);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + file.string() + " for writing");
    write_row(os, table.header);
    for (const auto& row : table.rows) write_row(os, row);
    if (!os) throw Error(ErrorCode::Io, "write failed for " + file.string());
}

CsvTable read_csv(const std::filesystem::path& file)
{
    std::ifstream is(file);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + file.string());
    CsvTable table;
    std::string line;
    if (std::getline(is, line)) table.header = split_row(line);
    while (std::getline(is, line)) {
        if (!line.empty()) table.rows.push_back(split_row(line));
    }
    return table;
}

void write_text(const std::filesystem::path& file, std::string_view text)
{
    std::ofstream os(file);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + file.string() + " for writing");
    os << text;
    if (!os) throw Error(ErrorCode::Io, "write failed for " + file.string());
}

namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#ff7f0e", "#9467bd", "#8c564b"};
constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

std::string escape(std::string_view text)
{
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string tick(double x)
{
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.3g", x);
    return buf.data();
}

std::string coord(double x)
{
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", x);
    return buf.data();
}

}  // namespace

std::string render_svg(const Chart& chart)
{
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (!(x_min <= x_max)) {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" "
          "height=\"600\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    os << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
       << escape(chart.title) << "</text>\n";

    // axes and ticks
    os << "<g stroke=\"black\" fill=\"none\">\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
       << "\" y2=\"" << kTop + plot_h << "\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
       << kTop + plot_h << "\"/>\n";
    os << "</g>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        const double fy = y_min + (y_max - y_min) * i / 5.0;
        os << "<text x=\"" << px(fx) << "\" y=\"" << kTop + plot_h + 18
           << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">"
           << tick(fy) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 20
       << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
    os << "<text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 20 " << kTop + plot_h / 2 << ")\">" << escape(chart.y_label)
       << "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = kPalette[k % kPalette.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) os << ' ';
            os << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = kTop + 16.0 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << kLeft + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
           << kLeft + plot_w - 120 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kLeft + plot_w - 112 << "\" y=\"" << ly + 4 << "\">"
           << escape(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace insider::report
