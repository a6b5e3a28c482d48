#pragma once
// Deterministic SVG scatter of one rubric item's failing submissions, colored
// by cluster with noise in gray.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "mcd/discover.hpp"
#include "mcd/rubric.hpp"

namespace mcd {

inline constexpr const char* kNoiseColor = "#9e9e9e";

// Distinct hues spread evenly around the wheel; index < count.
inline std::string cluster_color(std::size_t index, std::size_t count) {
    const double h = 360.0 * static_cast<double>(index) / static_cast<double>(std::max<std::size_t>(count, 1));
    // HSL(h, 0.65, 0.45) -> RGB
    const double s = 0.65, l = 0.45;
    const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = l - c / 2.0;
    auto byte = [&](double v) { return static_cast<int>(std::lround((v + m) * 255.0)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(r), byte(g), byte(b));
    return buf;
}

inline std::string xml_escape(const std::string& s) {
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

/// Scatter of the rows of `projection` that failed `report.rubric_item`.
inline std::string render_svg(const std::vector<ProjectionRow>& projection, const ClusterReport& report) {
    const unsigned bit = 1u << report.rubric_item;
    std::vector<const ProjectionRow*> pts;
    for (const auto& r : projection)
        if (r.failed_items & bit) pts.push_back(&r);

    std::map<std::string, std::size_t> cluster_of;  // id -> position in report.clusters
    for (std::size_t c = 0; c < report.clusters.size(); ++c)
        for (const auto& id : report.clusters[c].members) cluster_of[id] = c;

    const double W = 640, H = 480, margin = 30, legend_w = 170;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!pts.empty()) {
        xmin = xmax = pts[0]->x;
        ymin = ymax = pts[0]->y;
        for (auto* p : pts) {
            xmin = std::min(xmin, p->x), xmax = std::max(xmax, p->x);
            ymin = std::min(ymin, p->y), ymax = std::max(ymax, p->y);
        }
    }
    const double xs = xmax > xmin ? (W - legend_w - 2 * margin) / (xmax - xmin) : 0.0;
    const double ys = ymax > ymin ? (H - 2 * margin) / (ymax - ymin) : 0.0;
    const double cx = (W - legend_w) / 2, cy = H / 2;

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  W, H, W, H);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">R%zu %s</text>\n",
                  margin, report.rubric_item, std::string(kRubricNames[report.rubric_item]).c_str());
    out += buf;

    out += "<g id=\"points\">\n";
    for (auto* p : pts) {
        const double px = xs > 0 ? margin + (p->x - xmin) * xs : cx;
        const double py = ys > 0 ? H - margin - (p->y - ymin) * ys : cy;
        auto it = cluster_of.find(p->id);
        const std::string color =
            it == cluster_of.end() ? kNoiseColor : cluster_color(it->second, report.clusters.size());
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"4\" fill=\"%s\">", px, py, color.c_str());
        out += buf;
        out += "<title>" + xml_escape(p->id) + "</title></circle>\n";
    }
    out += "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    double ly = 40;
    const double lx = W - legend_w + 10;
    for (std::size_t c = 0; c < report.clusters.size(); ++c, ly += 18) {
        const auto& cl = report.clusters[c];
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.0f\" cy=\"%.0f\" r=\"5\" fill=\"%s\"/><text x=\"%.0f\" y=\"%.0f\">cluster %zu "
                      "(rank %zu%s)</text>\n",
                      lx, ly, cluster_color(c, report.clusters.size()).c_str(), lx + 10, ly + 4, cl.id,
                      cl.density_rank, cl.selected ? ", top" : "");
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.0f\" cy=\"%.0f\" r=\"5\" fill=\"%s\"/><text x=\"%.0f\" y=\"%.0f\">noise</text>\n", lx,
                  ly, kNoiseColor, lx + 10, ly + 4);
    out += buf;
    if (report.clusters.empty()) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\">no clusters</text>\n", lx, ly + 22);
        out += buf;
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace mcd
