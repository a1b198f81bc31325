#include "penduflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace penduflow {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    void settle() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

/// Maps data coordinates into the plot frame.
struct Frame {
    Range xr;
    Range yr;

    double x(double v) const { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight); }
    double y(double v) const { return kHeight - kBottom - (v - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& os, const ChartLabels& labels, const Frame& f) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(labels.title) << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
       << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.xr.lo + (f.xr.hi - f.xr.lo) * i / 4.0;
        const double yv = f.yr.lo + (f.yr.hi - f.yr.lo) * i / 4.0;
        os << "<text x=\"" << num(f.x(xv)) << "\" y=\"" << num(kHeight - kBottom + 16)
           << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(f.y(yv) + 4) << "\" text-anchor=\"end\">"
           << tick(yv) << "</text>\n";
        os << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(f.y(yv))
           << "\" y2=\"" << num(f.y(yv)) << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
       << escape(labels.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << kHeight / 2 << ")\">" << escape(labels.y_label) << "</text>\n";
}

}  // namespace

std::string line_chart(const ChartLabels& labels, const std::vector<ChartSeries>& series, std::size_t max_points) {
    Frame f;
    for (const auto& s : series) {
        for (double v : s.x) f.xr.add(v);
        for (double v : s.y) f.yr.add(v);
    }
    f.xr.settle();
    f.yr.settle();

    std::ostringstream os;
    open_svg(os, labels, f);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = max_points > 0 ? std::max<std::size_t>(1, (n + max_points - 1) / max_points) : 1;
        const char* color = kPalette[k % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < n; i += stride) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << num(f.x(s.x[i])) << ',' << num(f.y(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        if (!s.name.empty()) {
            const double ly = kTop + 16 + 16 * static_cast<double>(k);
            os << "<line x1=\"" << kWidth - kRight - 110 << "\" x2=\"" << kWidth - kRight - 90 << "\" y1=\"" << ly - 4
               << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << kWidth - kRight - 85 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string quiver_chart(const ChartLabels& labels, const std::vector<StreamSample>& field,
                         const std::vector<StationaryPoint>& points) {
    Frame f;
    for (const auto& s : field) {
        f.xr.add(s.Delta);
        f.yr.add(s.P);
    }
    f.xr.settle();
    f.yr.settle();

    // Arrows have unit screen length scaled by the local speed relative to the fastest.
    double vmax = 0.0;
    auto screen = [&](const StreamSample& s) {
        const double dx = s.dDelta / (f.xr.hi - f.xr.lo) * (kWidth - kLeft - kRight);
        const double dy = -s.dP / (f.yr.hi - f.yr.lo) * (kHeight - kTop - kBottom);
        return std::pair{dx, dy};
    };
    for (const auto& s : field) {
        const auto [dx, dy] = screen(s);
        if (std::isfinite(dx) && std::isfinite(dy)) vmax = std::max(vmax, std::hypot(dx, dy));
    }

    std::ostringstream os;
    open_svg(os, labels, f);
    constexpr double kArrow = 9.0;
    for (const auto& s : field) {
        const auto [dx, dy] = screen(s);
        const double len = std::hypot(dx, dy);
        if (!(len > 0.0) || !std::isfinite(len)) continue;
        const double scale = kArrow * (0.35 + 0.65 * std::sqrt(len / vmax)) / len;
        const double x0 = f.x(s.Delta);
        const double y0 = f.y(s.P);
        os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0 + dx * scale) << "\" y2=\""
           << num(y0 + dy * scale) << "\" stroke=\"#1f77b4\"/>\n";
        os << "<circle cx=\"" << num(x0 + dx * scale) << "\" cy=\"" << num(y0 + dy * scale)
           << "\" r=\"1.2\" fill=\"#1f77b4\"/>\n";
    }
    for (const auto& p : points) {
        os << "<circle cx=\"" << num(f.x(p.Delta)) << "\" cy=\"" << num(f.y(p.P))
           << "\" r=\"4\" fill=\"#d62728\"><title>" << kind_name(p.kind) << "</title></circle>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace penduflow
