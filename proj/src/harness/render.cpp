#include "rids/harness/render.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace rids::harness {

namespace {

struct View {
    double x0 = 0, y1 = 0, scale = 1;
    double px(double x) const { return (x - x0) * scale; }
    double py(double y) const { return (y1 - y) * scale; }
};

const char* verdict_color(Verdict v) {
    switch (v) {
        case Verdict::Cooperative: return "#2e9e44";
        case Verdict::Uncertain: return "#e0a800";
        case Verdict::Uncooperative: return "#d62728";
    }
    return "black";
}

void polygons(std::ostringstream& os, const View& view, const geo::Region& r, const std::string& attrs) {
    for (const geo::Polygon& p : r.parts) {
        os << "<polygon " << attrs << " points=\"";
        for (const geo::Vec2& v : p) os << view.px(v.x) << ',' << view.py(v.y) << ' ';
        os << "\"/>\n";
    }
}

geo::Vec2 centroid(const geo::Region& r) {
    geo::Vec2 c;
    int n = 0;
    for (const geo::Polygon& p : r.parts) {
        for (const geo::Vec2& v : p) {
            c = c + v;
            ++n;
        }
    }
    return n ? (1.0 / n) * c : c;
}

}  // namespace

std::string render_monitor_svg(const PeriodRecord& rec, const MonitorRecord& mon) {
    double lo[2] = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    double hi[2] = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    auto grow = [&](geo::Vec2 v) {
        lo[0] = std::min(lo[0], v.x);
        lo[1] = std::min(lo[1], v.y);
        hi[0] = std::max(hi[0], v.x);
        hi[1] = std::max(hi[1], v.y);
    };
    grow(mon.qBar.pos());
    for (const geo::Region& r : mon.eta) {
        for (const geo::Polygon& p : r.parts) {
            for (const geo::Vec2& v : p) grow(v);
        }
    }
    const double margin = 0.2 * std::max(hi[0] - lo[0], hi[1] - lo[1]) + 2.0;
    const double w = hi[0] - lo[0] + 2 * margin;
    const double h = hi[1] - lo[1] + 2 * margin;
    View view{lo[0] - margin, hi[1] + margin, 800.0 / w};
    const double H = h * view.scale;

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << H << "\" viewBox=\"0 0 800 " << H
       << "\">\n";
    os << "<rect width=\"800\" height=\"" << H << "\" fill=\"white\"/>\n";
    polygons(os, view, mon.Vh, "class=\"visibility\" fill=\"#f0f0f0\" stroke=\"none\"");

    for (std::size_t i = 0; i < mon.estimate.hypotheses.size(); ++i) {
        const monitor::OccupancyHypothesis& hyp = mon.estimate.hypotheses[i];
        for (std::size_t k = 0; k < hyp.perTopology.size(); ++k) {
            const monitor::TopologyOccupancy& t = hyp.perTopology[k];
            geo::Region shown;
            std::string attrs;
            if (t.presenceRequired) {
                shown = t.region;
                attrs = "class=\"required\" fill=\"red\" fill-opacity=\"0.35\" stroke=\"red\"";
            } else if (k < mon.eta.size()) {
                shown = geo::difference(mon.eta[k], mon.Vh);
                attrs = "class=\"free\" fill=\"green\" fill-opacity=\"0.25\" stroke=\"none\"";
            }
            polygons(os, view, shown, attrs);
            if (mon.estimate.hypotheses.size() > 1 && shown.has_parts()) {
                const geo::Vec2 c = centroid(shown);
                os << "<text class=\"label\" x=\"" << view.px(c.x) << "\" y=\"" << view.py(c.y)
                   << "\" font-size=\"12\">h" << i + 1 << "</text>\n";
            }
        }
    }
    for (const geo::Region& r : mon.eta) {
        polygons(os, view, r, "class=\"neighborhood\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"4 3\"");
    }

    for (const AgentRecord& a : rec.agents) {
        const char* fill = a.id == mon.monitor ? "#1f77b4" : (a.id == mon.target ? "black" : "#888");
        os << "<circle class=\"agent\" cx=\"" << view.px(a.q.x) << "\" cy=\"" << view.py(a.q.y)
           << "\" r=\"5\" fill=\"" << fill << "\"/>\n";
        os << "<text x=\"" << view.px(a.q.x) + 7 << "\" y=\"" << view.py(a.q.y) - 7 << "\" font-size=\"11\">" << a.id
           << "</text>\n";
    }
    os << "<circle class=\"ring\" cx=\"" << view.px(mon.qBar.x) << "\" cy=\"" << view.py(mon.qBar.y)
       << "\" r=\"11\" fill=\"none\" stroke-width=\"3\" stroke=\"" << verdict_color(mon.verdict) << "\"/>\n";
    os << "<text x=\"8\" y=\"18\" font-size=\"14\">period " << rec.period << "  t=" << rec.estimateTime << "  monitor "
       << mon.monitor << " -> target " << mon.target << ": " << monitor::verdict_name(mon.verdict) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

int render_frames(const std::vector<PeriodRecord>& trace, const std::string& outDir) {
    std::filesystem::create_directories(outDir);
    int written = 0;
    for (const PeriodRecord& rec : trace) {
        for (const MonitorRecord& m : rec.monitors) {
            char name[64];
            std::snprintf(name, sizeof name, "frame_%03d_m%d_t%d.svg", rec.period, m.monitor, m.target);
            std::ofstream out(std::filesystem::path(outDir) / name);
            if (!out) throw std::runtime_error(std::string("cannot write ") + name);
            out << render_monitor_svg(rec, m);
            ++written;
        }
    }
    return written;
}

}  // namespace rids::harness
