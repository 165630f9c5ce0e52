#include "peterlin/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace peterlin {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string csv_row(double nu, double eps, const LevelResult& l) {
    std::ostringstream out;
    out << l.n << ',' << fmt17(l.h) << ',' << fmt17(l.dt) << ',' << fmt17(nu) << ',' << fmt17(eps);
    for (double e : l.er) out << ',' << fmt17(e);
    out << ',' << fmt17(l.newton_avg_iters) << ',' << fmt17(l.wall_seconds) << '\n';
    return out.str();
}

void write_csv(std::ostream& out, double nu, double eps, const std::vector<LevelResult>& levels) {
    out << "# h column is 1/N (reporting convention); the structured mesh element diameter is sqrt(2)/N\n";
    out << kCsvHeader << '\n';
    for (const auto& l : levels) out << csv_row(nu, eps, l);
}

CsvData read_csv(std::istream& in) {
    CsvData data;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw std::runtime_error("csv line " + std::to_string(lineno) + ": unexpected header");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 13)
            throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 13 fields, got " +
                                     std::to_string(fields.size()));
        LevelResult l;
        try {
            std::size_t pos = 0;
            l.n = std::stoi(fields[0], &pos);
            l.h = std::stod(fields[1]);
            l.dt = std::stod(fields[2]);
            data.nu = std::stod(fields[3]);
            data.eps = std::stod(fields[4]);
            for (int i = 0; i < 6; ++i) l.er[i] = std::stod(fields[5 + i]);
            l.newton_avg_iters = std::stod(fields[11]);
            l.wall_seconds = std::stod(fields[12]);
        } catch (const std::exception&) {
            throw std::runtime_error("csv line " + std::to_string(lineno) + ": malformed number");
        }
        l.failed = std::isnan(l.er[0]);
        data.levels.push_back(l);
    }
    if (!header_seen) throw std::runtime_error("csv: missing header line");
    return data;
}

std::string format_table(const std::vector<LevelResult>& levels) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%6s %10s  %9s %9s %9s %9s %9s %9s  %5s %8s\n", "N", "h", "Er1", "Er2",
                  "Er3", "Er4", "Er5", "Er6", "iters", "secs");
    out << buf;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& l = levels[i];
        std::snprintf(buf, sizeof buf, "%6d %10.3e  %9.2e %9.2e %9.2e %9.2e %9.2e %9.2e  %5.1f %8.1f\n", l.n,
                      l.h, l.er[0], l.er[1], l.er[2], l.er[3], l.er[4], l.er[5], l.newton_avg_iters,
                      l.wall_seconds);
        out << buf;
        if (i + 1 < levels.size() && !l.failed && !levels[i + 1].failed) {
            std::snprintf(buf, sizeof buf, "%6s %10s  %9.2f %9.2f %9.2f %9.2f %9.2f %9.2f\n", "", "slope",
                          convergence_slope(l.er[0], levels[i + 1].er[0], l.n, levels[i + 1].n),
                          convergence_slope(l.er[1], levels[i + 1].er[1], l.n, levels[i + 1].n),
                          convergence_slope(l.er[2], levels[i + 1].er[2], l.n, levels[i + 1].n),
                          convergence_slope(l.er[3], levels[i + 1].er[3], l.n, levels[i + 1].n),
                          convergence_slope(l.er[4], levels[i + 1].er[4], l.n, levels[i + 1].n),
                          convergence_slope(l.er[5], levels[i + 1].er[5], l.n, levels[i + 1].n));
            out << buf;
        }
    }
    return out.str();
}

std::string render_plot_svg(const CsvData& data) {
    if (data.levels.empty()) throw std::runtime_error("plot: csv contains no data rows");

    const double width = 720, height = 520;
    const double x0 = 90, x1 = 560, y0 = 40, y1 = 440;

    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& l : data.levels) {
        lo_x = std::min(lo_x, std::log10(l.h));
        hi_x = std::max(hi_x, std::log10(l.h));
        for (double e : l.er)
            if (e > 0.0 && !std::isnan(e)) {
                lo_y = std::min(lo_y, std::log10(e));
                hi_y = std::max(hi_y, std::log10(e));
            }
    }
    if (!(lo_y <= hi_y)) throw std::runtime_error("plot: no positive error values");
    lo_x -= 0.15;
    hi_x += 0.15;
    lo_y -= 0.3;
    hi_y += 0.3;

    auto px = [&](double h) { return x0 + (std::log10(h) - lo_x) / (hi_x - lo_x) * (x1 - x0); };
    auto py = [&](double e) { return y1 - (std::log10(e) - lo_y) / (hi_y - lo_y) * (y1 - y0); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << fmt2(x0) << "\" y=\"" << fmt2(y0) << "\" width=\"" << fmt2(x1 - x0)
        << "\" height=\"" << fmt2(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // decade grid lines and labels
    for (int d = static_cast<int>(std::ceil(lo_x)); d <= static_cast<int>(std::floor(hi_x)); ++d) {
        const double x = x0 + (d - lo_x) / (hi_x - lo_x) * (x1 - x0);
        svg << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(y0) << "\" x2=\"" << fmt2(x) << "\" y2=\""
            << fmt2(y1) << "\" stroke=\"#cccccc\"/>\n";
        svg << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(y1 + 18)
            << "\" font-size=\"12\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(lo_y)); d <= static_cast<int>(std::floor(hi_y)); ++d) {
        const double y = y1 - (d - lo_y) / (hi_y - lo_y) * (y1 - y0);
        svg << "<line x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x1) << "\" y2=\""
            << fmt2(y) << "\" stroke=\"#cccccc\"/>\n";
        svg << "<text x=\"" << fmt2(x0 - 8) << "\" y=\"" << fmt2(y + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    svg << "<text x=\"" << fmt2((x0 + x1) / 2) << "\" y=\"" << fmt2(y1 + 40)
        << "\" font-size=\"14\" text-anchor=\"middle\">h</text>\n";
    svg << "<text x=\"20\" y=\"" << fmt2((y0 + y1) / 2)
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << fmt2((y0 + y1) / 2)
        << ")\">relative error</text>\n";

    static const char* kColors[6] = {"#1f77b4", "#1f77b4", "#d62728", "#d62728", "#2ca02c", "#2ca02c"};
    static const bool kFilled[6] = {false, true, false, true, false, true};
    static const char* kShape[6] = {"circle", "circle", "triangle", "triangle", "square", "square"};

    auto marker = [&](double cx, double cy, int series) {
        const char* color = kColors[series];
        const std::string fill = kFilled[series] ? color : "white";
        if (std::string(kShape[series]) == "circle") {
            svg << "<circle cx=\"" << fmt2(cx) << "\" cy=\"" << fmt2(cy) << "\" r=\"4\" fill=\"" << fill
                << "\" stroke=\"" << color << "\"/>\n";
        } else if (std::string(kShape[series]) == "triangle") {
            svg << "<path d=\"M " << fmt2(cx) << ' ' << fmt2(cy - 5) << " L " << fmt2(cx - 4.5) << ' '
                << fmt2(cy + 4) << " L " << fmt2(cx + 4.5) << ' ' << fmt2(cy + 4) << " Z\" fill=\"" << fill
                << "\" stroke=\"" << color << "\"/>\n";
        } else {
            svg << "<rect x=\"" << fmt2(cx - 4) << "\" y=\"" << fmt2(cy - 4)
                << "\" width=\"8\" height=\"8\" fill=\"" << fill << "\" stroke=\"" << color << "\"/>\n";
        }
    };

    for (int s = 0; s < 6; ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << kColors[s] << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& l : data.levels)
            if (l.er[s] > 0.0 && !std::isnan(l.er[s])) svg << fmt2(px(l.h)) << ',' << fmt2(py(l.er[s])) << ' ';
        svg << "\" class=\"series\"/>\n";
        for (const auto& l : data.levels)
            if (l.er[s] > 0.0 && !std::isnan(l.er[s])) marker(px(l.h), py(l.er[s]), s);
    }

    // slope-1 reference triangle anchored below the data
    {
        const double ha = std::pow(10.0, lo_x + 0.25);
        const double hb = std::pow(10.0, lo_x + 0.25 + 0.4);
        const double ea = std::pow(10.0, lo_y + 0.35);
        const double eb = ea * (hb / ha);  // slope 1 in the log-log plane
        svg << "<path d=\"M " << fmt2(px(ha)) << ' ' << fmt2(py(ea)) << " L " << fmt2(px(hb)) << ' '
            << fmt2(py(ea)) << " L " << fmt2(px(hb)) << ' ' << fmt2(py(eb)) << " Z\" fill=\"none\" "
            << "stroke=\"black\" class=\"reference-triangle\"/>\n";
        svg << "<text x=\"" << fmt2(px(hb) + 6) << "\" y=\"" << fmt2((py(ea) + py(eb)) / 2)
            << "\" font-size=\"12\">1</text>\n";
    }

    // legend
    for (int s = 0; s < 6; ++s) {
        const double lx = x1 + 24, ly = y0 + 18 + 22 * s;
        marker(lx, ly, s);
        svg << "<text x=\"" << fmt2(lx + 12) << "\" y=\"" << fmt2(ly + 4) << "\" font-size=\"13\">Er" << s + 1
            << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace peterlin
