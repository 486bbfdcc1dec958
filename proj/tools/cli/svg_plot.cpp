#include "svg_plot.hpp"

#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fieldline::cli {

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string escapeXml(const std::string& s)
{
    std::string out;
    for(char c : s) {
        switch(c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tickLabel(double v, double step)
{
    if(std::fabs(v) < 1e-9 * step) v = 0;
    int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
    if(decimals > 6 || std::fabs(v) >= 1e6) return fmt("%.3g", v);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

std::vector<double> TickScale::ticks() const
{
    std::vector<double> out;
    long first = std::lround(std::ceil(lo / step - 1e-9));
    long last = std::lround(std::floor(hi / step + 1e-9));
    for(long i = first; i <= last; i++) out.push_back(static_cast<double>(i) * step);
    return out;
}

TickScale niceScale(double lo, double hi, int targetTicks)
{
    if(!(hi > lo)) {
        double pad = std::max(std::fabs(lo) * 0.05, 0.5);
        lo -= pad;
        hi += pad;
    }
    double raw = (hi - lo) / std::max(targetTicks - 1, 1);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = (norm < 1.5 ? 1 : norm < 3 ? 2 : norm < 7 ? 5 : 10) * mag;
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

std::string trajectorySvg(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                          double extent)
{
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for(size_t i = 0; i < x.size() && i < y.size(); i++) {
        if(!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
        ymin = std::min(ymin, y[i]);
        ymax = std::max(ymax, y[i]);
    }
    if(!(xmax >= xmin)) xmin = xmax = ymin = ymax = 0;

    TickScale sx = niceScale(xmin, xmax), sy = niceScale(ymin, ymax);
    double spanX = sx.hi - sx.lo, spanY = sy.hi - sy.lo;
    double scale = extent / std::max(spanX, spanY);
    // keep a thin trajectory visible without changing the unit length
    const double minSide = 120;
    if(spanY * scale < minSide) {
        double extra = (minSide / scale - spanY) / 2;
        sy = niceScale(sy.lo - extra, sy.hi + extra);
    }
    if(spanX * scale < minSide) {
        double extra = (minSide / scale - spanX) / 2;
        sx = niceScale(sx.lo - extra, sx.hi + extra);
    }
    spanX = sx.hi - sx.lo;
    spanY = sy.hi - sy.lo;
    scale = std::min(scale, extent / std::max(spanX, spanY));

    const double left = 70, right = 20, top = title.empty() ? 20 : 40, bottom = 50;
    const double plotW = spanX * scale, plotH = spanY * scale;
    const double width = left + plotW + right, height = top + plotH + bottom;
    auto px = [&](double v) { return left + (v - sx.lo) * scale; };
    auto py = [&](double v) { return top + (sy.hi - v) * scale; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.1f", width) << "\" height=\""
        << fmt("%.1f", height) << "\" viewBox=\"0 0 " << fmt("%.1f", width) << " " << fmt("%.1f", height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if(!title.empty())
        svg << "<text x=\"" << fmt("%.1f", width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"13\">"
            << escapeXml(title) << "</text>\n";

    svg << "<g stroke=\"#dddddd\" stroke-width=\"0.5\">\n";
    for(double t : sx.ticks())
        svg << "<line x1=\"" << fmt("%.2f", px(t)) << "\" y1=\"" << fmt("%.2f", top) << "\" x2=\""
            << fmt("%.2f", px(t)) << "\" y2=\"" << fmt("%.2f", top + plotH) << "\"/>\n";
    for(double t : sy.ticks())
        svg << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", py(t)) << "\" x2=\""
            << fmt("%.2f", left + plotW) << "\" y2=\"" << fmt("%.2f", py(t)) << "\"/>\n";
    svg << "</g>\n";
    svg << "<rect x=\"" << fmt("%.2f", left) << "\" y=\"" << fmt("%.2f", top) << "\" width=\"" << fmt("%.2f", plotW)
        << "\" height=\"" << fmt("%.2f", plotH) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for(double t : sx.ticks())
        svg << "<text x=\"" << fmt("%.2f", px(t)) << "\" y=\"" << fmt("%.2f", top + plotH + 16)
            << "\" text-anchor=\"middle\">" << tickLabel(t, sx.step) << "</text>\n";
    for(double t : sy.ticks())
        svg << "<text x=\"" << fmt("%.2f", left - 6) << "\" y=\"" << fmt("%.2f", py(t) + 4)
            << "\" text-anchor=\"end\">" << tickLabel(t, sy.step) << "</text>\n";
    svg << "<text x=\"" << fmt("%.2f", left + plotW / 2) << "\" y=\"" << fmt("%.2f", top + plotH + 38)
        << "\" text-anchor=\"middle\">x</text>\n";
    svg << "<text x=\"18\" y=\"" << fmt("%.2f", top + plotH / 2) << "\" text-anchor=\"middle\">y</text>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.2\" stroke-linejoin=\"round\" points=\"";
    bool firstPoint = true;
    for(size_t i = 0; i < x.size() && i < y.size(); i++) {
        if(!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        if(!firstPoint) svg << ' ';
        svg << fmt("%.2f", px(x[i])) << ',' << fmt("%.2f", py(y[i]));
        firstPoint = false;
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

void writeFileAtomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path().empty() ? fs::path(".") : target.parent_path();
    std::random_device rd;
    fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary);
        if(!out) throw Failure(ExitConfig, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if(!out) {
            fs::remove(tmp);
            throw Failure(ExitConfig, "write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if(ec) {
        fs::remove(tmp);
        throw Failure(ExitConfig, "cannot rename onto '" + target.string() + "': " + ec.message());
    }
}

}  // namespace fieldline::cli
