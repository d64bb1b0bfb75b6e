#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cipherlab {

namespace {

constexpr double kWidth = 820, kHeight = 520;
constexpr double kLeft = 70, kRight = 780, kTop = 50, kBottom = 460;

const char* kPalette[] = {"#1f6fb4", "#d1495b", "#2e8b57", "#b8860b", "#6a4fa3", "#444444"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Linear three-stop color ramp (dark blue -> orange -> light yellow).
std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto lerp = [](int a, int b, double u) { return static_cast<int>(a + (b - a) * u); };
    int r, g, b;
    if (t < 0.5) {
        const double u = t / 0.5;
        r = lerp(20, 220, u);
        g = lerp(30, 120, u);
        b = lerp(90, 40, u);
    } else {
        const double u = (t - 0.5) / 0.5;
        r = lerp(220, 250, u);
        g = lerp(120, 235, u);
        b = lerp(40, 120, u);
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

struct Range {
    double lo = 0, hi = 1;
    double map(double v, double out_lo, double out_hi) const {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return out_lo + t * (out_hi - out_lo);
    }
};

void header(std::ofstream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void text(std::ofstream& out, double x, double y, const std::string& s, int size = 13,
          const char* anchor = "middle") {
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\""
        << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

} // namespace

void write_line_plot(const std::string& path, const std::vector<PlotSeries>& series,
                     const std::string& title, const std::string& x_label,
                     const std::string& y_label) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot: " + path);

    Range xr, yr;
    bool any = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("plot series length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                xr = {s.x[i], s.x[i]};
                yr = {s.y[i], s.y[i]};
                any = true;
            }
            xr.lo = std::min(xr.lo, s.x[i]);
            xr.hi = std::max(xr.hi, s.x[i]);
            yr.lo = std::min(yr.lo, s.y[i]);
            yr.hi = std::max(yr.hi, s.y[i]);
        }
    }
    if (!any) {
        xr = {0, 1};
        yr = {0, 1};
    }
    if (xr.hi == xr.lo) xr.hi = xr.lo + 1;
    if (yr.hi == yr.lo) yr.hi = yr.lo + 1;

    header(out);
    text(out, (kLeft + kRight) / 2, 28, title, 16);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = i / 5.0;
        const double x = kLeft + t * (kRight - kLeft);
        const double y = kBottom - t * (kBottom - kTop);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
        text(out, x, kBottom + 20, fmt(xr.lo + t * (xr.hi - xr.lo)), 11);
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft
            << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
        text(out, kLeft - 10, y + 4, fmt(yr.lo + t * (yr.hi - yr.lo)), 11, "end");
    }
    text(out, (kLeft + kRight) / 2, kHeight - 12, x_label, 13);
    text(out, 18, (kTop + kBottom) / 2, y_label, 13);

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.x.empty()) continue;
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << fmt(xr.map(s.x[i], kLeft, kRight)) << ","
                << fmt(yr.map(s.y[i], kBottom, kTop)) << " ";
        out << "\"/>\n";
        const double ly = kTop + 18 * static_cast<double>(si);
        out << "<line x1=\"" << kRight - 150 << "\" y1=\"" << fmt(ly) << "\" x2=\""
            << kRight - 125 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"3\"/>\n";
        text(out, kRight - 118, ly + 4, s.label, 12, "start");
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("short write on plot: " + path);
}

void write_simplex_heatmap(const std::string& path, const std::vector<SimplexGridPoint>& grid,
                           const std::string& title) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write heatmap: " + path);

    double max_norm = 0;
    for (const auto& p : grid) max_norm = std::max(max_norm, p.gradnorm);
    if (max_norm == 0) max_norm = 1;

    // Barycentric -> 2D: vertices at (0,0), (1,0), (0.5, sqrt(3)/2).
    const double side = 420, x0 = 200, y0 = 470;
    auto to_xy = [&](double b1, double b2, double b3) {
        (void)b1;
        const double x = b2 + 0.5 * b3;
        const double y = 0.8660254037844386 * b3;
        return std::pair<double, double>{x0 + side * x, y0 - side * y};
    };

    header(out);
    text(out, kWidth / 2, 28, title, 16);
    const auto va = to_xy(1, 0, 0), vb = to_xy(0, 1, 0), vc = to_xy(0, 0, 1);
    out << "<polygon points=\"" << fmt(va.first) << "," << fmt(va.second) << " "
        << fmt(vb.first) << "," << fmt(vb.second) << " " << fmt(vc.first) << ","
        << fmt(vc.second) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const auto& p : grid) {
        const auto [x, y] = to_xy(p.b1, p.b2, p.b3);
        out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3.2\" fill=\""
            << ramp(p.gradnorm / max_norm) << "\"/>\n";
    }
    text(out, va.first - 14, va.second + 14, "v1 (true)", 12, "start");
    text(out, vb.first + 6, vb.second + 14, "v2", 12, "start");
    text(out, vc.first, vc.second - 10, "v3", 12);
    // color bar
    for (int i = 0; i < 100; ++i) {
        const double t = i / 99.0;
        out << "<rect x=\"" << fmt(700.0) << "\" y=\"" << fmt(430.0 - 3.0 * i)
            << "\" width=\"22\" height=\"3.2\" fill=\"" << ramp(t) << "\"/>\n";
    }
    text(out, 735, 435, "0", 11, "start");
    text(out, 735, 135, fmt(max_norm), 11, "start");
    text(out, 711, 120, "|grad D|", 11);
    out << "</svg>\n";
    if (!out) throw std::runtime_error("short write on heatmap: " + path);
}

} // namespace cipherlab
