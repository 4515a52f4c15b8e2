#include "rqv/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace rqv {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, ptr);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0;
    double hi = 1.0;

    bool shows(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
    double map(double v) const { return log ? std::log10(v) : v; }

    void fit(double min_v, double max_v) {
        if (!(min_v <= max_v)) {
            min_v = log ? 1.0 : 0.0;
            max_v = log ? 10.0 : 1.0;
        }
        lo = map(min_v);
        hi = map(max_v);
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double e = std::ceil(lo); e <= std::floor(hi) + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
            if (out.size() < 2) out = {std::pow(10.0, lo), std::pow(10.0, hi)};
            return out;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {2.0, 5.0, 10.0}) {
            if (step < raw) step = m * mag;
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
            out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        }
        return out;
    }
};

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::vector<Marker>& markers,
                       const ChartOptions& options) {
    Axis ax{options.log_x};
    Axis ay{options.log_y};
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!ax.shows(s.x[i]) || !ay.shows(s.y[i])) continue;
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    ax.fit(x_min, x_max);
    ay.fit(y_min, y_max);

    const double left = 80;
    const double right = 160;
    const double top = 40;
    const double bottom = 60;
    const double pw = options.width - left - right;
    const double ph = options.height - top - bottom;
    auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(options.title) << "</text>\n";
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ax.ticks()) {
        const double x = px(t);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(x) << "\" y2=\""
           << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">" << fmt(t)
           << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(y)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << fmt(t)
           << "</text>\n";
    }
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(options.height - 15.0)
       << "\" text-anchor=\"middle\">" << escape(options.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(options.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        std::string d;
        bool pen_down = false;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!ax.shows(s.x[i]) || !ay.shows(s.y[i])) {
                pen_down = false;
                continue;
            }
            d += (pen_down ? " L" : " M") + fmt(px(s.x[i])) + " " + fmt(py(s.y[i]));
            pen_down = true;
        }
        if (!d.empty()) {
            os << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"/>\n";
        }
        const double ly = top + 16.0 * static_cast<double>(k) + 8;
        os << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw + 32)
           << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(left + pw + 36) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.name)
           << "</text>\n";
    }
    for (const auto& m : markers) {
        if (!ax.shows(m.x) || !ay.shows(m.y)) continue;
        os << "<circle cx=\"" << fmt(px(m.x)) << "\" cy=\"" << fmt(py(m.y))
           << "\" r=\"4\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace rqv
