#include "icflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace icflow {

namespace {

constexpr double kSize = 480.0;
constexpr double kMargin = 40.0;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
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

// blue to red
std::string colour(std::size_t i, std::size_t n)
{
    const double s = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(40 + 200 * s), 60, static_cast<int>(220 - 180 * s));
    return buf;
}

}  // namespace

std::array<double, 2> project(const SpaceForm& sf, double r, double theta)
{
    double R = r;
    if (sf.K() == -1) R = std::tanh(0.5 * r);
    if (sf.K() == 1) R = std::sin(r);
    return {R * std::cos(theta), R * std::sin(theta)};
}

std::string overlay_svg(const std::vector<SvgCurve>& curves, const std::string& title)
{
    if (curves.empty()) throw std::invalid_argument("overlay_svg: no curves");
    const auto& sf = curves.front().curve->space();

    double extent = sf.K() == 0 ? 0.0 : 1.0;
    if (sf.K() == 0)
        for (const auto& sc : curves)
            for (double r : sc.curve->rho()) extent = std::max(extent, r);
    const double scale = 0.5 * (kSize - 2 * kMargin) / (1.05 * extent);
    const double cx = 0.5 * kSize, cy = 0.5 * kSize;
    auto X = [&](double x) { return fmt(cx + scale * x); };
    auto Y = [&](double y) { return fmt(cy - scale * y); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(kSize) + "\" height=\"" +
         fmt(kSize + 20.0 * static_cast<double>(curves.size())) + "\">\n";
    s += "<title>" + escape(title) + "</title>\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (sf.K() != 0)
        s += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(scale) +
             "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    s += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"2\" fill=\"black\"/>\n";

    for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto& c = *curves[k].curve;
        std::string pts;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto p = project(sf, c.rho(i), c.theta(i));
            if (i) pts += ' ';
            pts += X(p[0]) + ',' + Y(p[1]);
        }
        const auto col = colour(k, curves.size());
        s += "<polygon points=\"" + pts + "\" fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1.5\"/>\n";
        s += "<text x=\"10\" y=\"" + fmt(kSize + 20.0 * static_cast<double>(k)) + "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
             col + "\">" + escape(curves[k].label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace icflow
