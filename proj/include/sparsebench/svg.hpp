#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sparsebench/experiments.hpp"

namespace sparsebench {
namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline const char* algorithm_color(Algorithm a) {
    switch (a) {
        case Algorithm::OmpK: return "#1f77b4";
        case Algorithm::OmpE: return "#d62728";
        case Algorithm::Sp: return "#2ca02c";
        case Algorithm::Bp: return "#9467bd";
    }
    return "#000000";
}

struct Canvas {
    double width = 0;
    double height = 0;
    std::string body;

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0, const std::string& dash = "") {
        body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                num(stroke_width) + "\"";
        if (!dash.empty()) body += " stroke-dasharray=\"" + dash + "\"";
        body += "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width = 1.5) {
        if (pts.size() < 2) return;
        body += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                num(stroke_width) + "\" points=\"";
        for (const auto& [x, y] : pts) body += num(x) + "," + num(y) + " ";
        body += "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                "\" fill=\"" + fill + "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start", const std::string& fill = "#222222") {
        body += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
                std::to_string(size) +
                "\" font-family=\"Helvetica,Arial,sans-serif\" text-anchor=\"" + anchor +
                "\" fill=\"" + fill + "\">" + s + "</text>\n";
    }

    std::string render() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
               "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
               num(height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n" +
               body + "</svg>\n";
    }
};

struct PanelData {
    std::string title;
    std::vector<TransitionCurve> curves;
};

// One panel per ensemble laid out horizontally. Axes: lambda in [0.1, 0.9]
// left to right, rho_50 in [0, 1] bottom to top.
inline std::string phase_panels(const std::vector<PanelData>& panels) {
    const double panel_w = 360, panel_h = 320;
    const double ml = 52, mr = 16, mt = 36, mb = 60;
    Canvas c;
    c.width = panel_w * static_cast<double>(panels.size());
    c.height = panel_h;

    const double lam_lo = 0.1, lam_hi = 0.9;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const double x0 = panel_w * static_cast<double>(p) + ml;
        const double x1 = panel_w * static_cast<double>(p + 1) - mr;
        const double y0 = panel_h - mb;
        const double y1 = mt;
        auto sx = [&](double lam) {
            return x0 + (lam - lam_lo) / (lam_hi - lam_lo) * (x1 - x0);
        };
        auto sy = [&](double rho) { return y0 + rho * (y1 - y0); };

        c.line(x0, y0, x1, y0, "#444444");
        c.line(x0, y0, x0, y1, "#444444");
        for (int i = 1; i <= 9; ++i) {
            const double lam = 0.1 * i;
            c.line(sx(lam), y0, sx(lam), y0 + 4, "#444444");
            char lbl[16];
            std::snprintf(lbl, sizeof(lbl), "%.1f", lam);
            c.text(sx(lam), y0 + 18, lbl, 10, "middle");
        }
        for (int i = 0; i <= 5; ++i) {
            const double rho = 0.2 * i;
            c.line(x0 - 4, sy(rho), x0, sy(rho), "#444444");
            char lbl[16];
            std::snprintf(lbl, sizeof(lbl), "%.1f", rho);
            c.text(x0 - 8, sy(rho) + 4, lbl, 10, "end");
        }
        c.text((x0 + x1) / 2, y0 + 34, "lambda = M/N", 11, "middle");
        c.text((x0 + x1) / 2, y1 - 12, panels[p].title, 13, "middle");

        for (const auto& curve : panels[p].curves) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& pt : curve.points) {
                if (!std::isfinite(pt.rho_50)) continue;
                const double rho = std::clamp(pt.rho_50, 0.0, 1.0);
                pts.emplace_back(sx(pt.lambda), sy(rho));
            }
            const std::string color = algorithm_color(curve.algorithm);
            c.polyline(pts, color);
            for (const auto& [px, py] : pts) c.circle(px, py, 2.5, color);
        }

        // legend in the lower-right of each panel
        double ly = y0 - 14.0 * static_cast<double>(panels[p].curves.size()) - 6;
        for (const auto& curve : panels[p].curves) {
            const std::string color = algorithm_color(curve.algorithm);
            c.line(x1 - 96, ly, x1 - 76, ly, color, 2.0);
            c.text(x1 - 70, ly + 4, to_string(curve.algorithm), 11);
            ly += 14;
        }
    }
    return c.render();
}

// Bar chart of missed-index counts with the k/4 marker and the k/2 admissible
// cutoff annotated.
inline std::string histogram_chart(const NfHistogram& h, const std::string& title) {
    const double w = 560, hgt = 360;
    const double ml = 56, mr = 20, mt = 40, mb = 56;
    Canvas c;
    c.width = w;
    c.height = hgt;

    const std::size_t cutoff = (h.k + 1) / 2 - 1;
    std::size_t nf_hi = std::max<std::size_t>(h.max_nf, cutoff) + 1;
    std::uint64_t count_hi = 1;
    for (const auto& [nf, count] : h.counts) count_hi = std::max(count_hi, count);

    const double x0 = ml, x1 = w - mr, y0 = hgt - mb, y1 = mt;
    auto sx = [&](double nf) {
        return x0 + nf / static_cast<double>(nf_hi + 1) * (x1 - x0);
    };
    auto sy = [&](double count) {
        return y0 - count / (1.1 * static_cast<double>(count_hi)) * (y0 - y1);
    };

    c.line(x0, y0, x1, y0, "#444444");
    c.line(x0, y0, x0, y1, "#444444");
    c.text((x0 + x1) / 2, y1 - 14, title, 13, "middle");
    c.text((x0 + x1) / 2, y0 + 34, "false indices before completion", 11, "middle");

    const double bar_w = 0.8 * (sx(1) - sx(0));
    for (const auto& [nf, count] : h.counts) {
        const double bx = sx(static_cast<double>(nf)) + 0.1 * (sx(1) - sx(0));
        const double by = sy(static_cast<double>(count));
        c.rect(bx, by, bar_w, y0 - by, "#1f77b4");
        c.text(bx + bar_w / 2, by - 4, std::to_string(count), 9, "middle");
    }

    const std::size_t tick_step = std::max<std::size_t>(1, nf_hi / 12);
    for (std::size_t nf = 0; nf <= nf_hi; nf += tick_step) {
        const double tx = sx(static_cast<double>(nf)) + 0.5 * (sx(1) - sx(0));
        c.text(tx, y0 + 16, std::to_string(nf), 10, "middle");
    }

    const double quarter_x = sx(static_cast<double>(h.k) / 4.0) + 0.5 * (sx(1) - sx(0));
    c.line(quarter_x, y0, quarter_x, y1, "#d62728", 1.0, "5,4");
    c.text(quarter_x + 4, y1 + 14, "k/4", 11, "start", "#d62728");

    const double cut_x = sx(static_cast<double>(cutoff)) + 0.5 * (sx(1) - sx(0));
    c.line(cut_x, y0, cut_x, y1, "#2ca02c", 1.0, "5,4");
    c.text(cut_x + 4, y1 + 30, "ceil(k/2)-1 = " + std::to_string(cutoff), 11, "start", "#2ca02c");

    c.text(x1, y1 + 14,
           "omp_k: " + std::to_string(h.ompk_successes) +
               "   omp_e: " + std::to_string(h.ompe_successes) + " / " +
               std::to_string(h.trials),
           11, "end");
    return c.render();
}

}  // namespace svg
}  // namespace sparsebench
