#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ovalix/curves.hpp"
#include "ovalix/sim.hpp"

namespace ovalix {

/// Standalone-SVG phase-plane plots: window, dashed curve polylines, solid
/// trajectories and optional stability-subdomain shading sampled on a grid.
class SvgPlot {
public:
    struct Options {
        Window window{0, 1, 0, 1};
        int width = 640;
        int height = 640;
        bool logx = false;
        bool logy = false;
        int margin = 40;
    };

    explicit SvgPlot(Options opt) : opt_(opt) {}

    void add_polyline(const Polyline& pl, const std::string& stroke, bool dashed) {
        std::string d;
        bool pen_up = true;
        for (const auto& p : pl.pts) {
            if (!inside_axis(p[0], p[1]) || !inside_window(p[0], p[1])) {
                pen_up = true;
                continue;
            }
            d += pen_up ? "M " : "L ";
            d += fmt(px(p[0])) + " " + fmt(py(p[1])) + " ";
            pen_up = false;
        }
        if (d.empty()) return;
        body_ += "<path fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1.2\"";
        if (dashed) body_ += " stroke-dasharray=\"6 4\"";
        body_ += " d=\"" + d + "\"/>\n";
    }

    void add_curve(const OvalSet& set, const std::string& stroke = "#000") {
        for (const auto& pl : set.ovals) add_polyline(pl, stroke, true);
        for (const auto& pl : set.open_components) add_polyline(pl, stroke, true);
    }

    void add_trajectory(const Trajectory& traj, const std::string& stroke = "#1b6ca8") {
        Polyline pl;
        for (const auto& s : traj.samples) pl.pts.push_back({s.x, s.y});
        add_polyline(pl, stroke, false);
        if (!traj.samples.empty()) {
            const auto& s0 = traj.samples.front();
            if (inside_axis(s0.x, s0.y))
                body_ += "<circle cx=\"" + fmt(px(s0.x)) + "\" cy=\"" + fmt(py(s0.y)) +
                         "\" r=\"2.5\" fill=\"" + stroke + "\"/>\n";
        }
    }

    /// Shades grid cells where field(x, y) < 0 (the stable subdomain).
    void add_shading(const std::function<double(double, double)>& field, int res,
                     const std::string& fill = "#f1a7e7") {
        double cw = static_cast<double>(opt_.width) / res;
        double chh = static_cast<double>(opt_.height) / res;
        for (int j = 0; j < res; ++j) {
            for (int i = 0; i < res; ++i) {
                double cx = unx(opt_.margin + (i + 0.5) * cw);
                double cy = uny(opt_.margin + (j + 0.5) * chh);
                if (field(cx, cy) >= 0) continue;
                body_ += "<rect x=\"" + fmt(opt_.margin + i * cw) + "\" y=\"" +
                         fmt(opt_.margin + j * chh) + "\" width=\"" + fmt(cw + 0.5) +
                         "\" height=\"" + fmt(chh + 0.5) + "\" fill=\"" + fill +
                         "\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
            }
        }
    }

    std::string str() const {
        int W = opt_.width + 2 * opt_.margin;
        int H = opt_.height + 2 * opt_.margin;
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                          std::to_string(W) + "\" height=\"" + std::to_string(H) +
                          "\" viewBox=\"0 0 " + std::to_string(W) + " " + std::to_string(H) +
                          "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out += "<rect x=\"" + std::to_string(opt_.margin) + "\" y=\"" +
               std::to_string(opt_.margin) + "\" width=\"" + std::to_string(opt_.width) +
               "\" height=\"" + std::to_string(opt_.height) +
               "\" fill=\"none\" stroke=\"#444\"/>\n";
        out += axis_labels();
        out += body_;
        out += "</svg>\n";
        return out;
    }

private:
    static std::string fmt(double v) { return detail::fmt_double(std::round(v * 100) / 100); }

    double tx(double x) const { return opt_.logx ? std::log10(x) : x; }
    double ty(double y) const { return opt_.logy ? std::log10(y) : y; }
    bool inside_axis(double x, double y) const {
        return (!opt_.logx || x > 0) && (!opt_.logy || y > 0) && std::isfinite(x) &&
               std::isfinite(y);
    }
    // soft clip: points slightly past the window still draw, far ones lift the pen
    bool inside_window(double x, double y) const {
        double ax = tx(opt_.window.x0), bx = tx(opt_.window.x1);
        double ay = ty(opt_.window.y0), by = ty(opt_.window.y1);
        double mx = 0.02 * (bx - ax), my = 0.02 * (by - ay);
        return tx(x) >= ax - mx && tx(x) <= bx + mx && ty(y) >= ay - my && ty(y) <= by + my;
    }
    double px(double x) const {
        double a = tx(opt_.window.x0), b = tx(opt_.window.x1);
        return opt_.margin + (tx(x) - a) / (b - a) * opt_.width;
    }
    double py(double y) const {
        double a = ty(opt_.window.y0), b = ty(opt_.window.y1);
        return opt_.margin + opt_.height - (ty(y) - a) / (b - a) * opt_.height;
    }
    // inverse maps for shading (pixel center -> data coords)
    double unx(double p) const {
        double a = tx(opt_.window.x0), b = tx(opt_.window.x1);
        double v = a + (p - opt_.margin) / opt_.width * (b - a);
        return opt_.logx ? std::pow(10.0, v) : v;
    }
    double uny(double p) const {
        double a = ty(opt_.window.y0), b = ty(opt_.window.y1);
        double v = a + (opt_.margin + opt_.height - p) / opt_.height * (b - a);
        return opt_.logy ? std::pow(10.0, v) : v;
    }

    std::string axis_labels() const {
        auto label = [&](double vx, double vy, const std::string& text, bool xaxis) {
            double X = xaxis ? px(vx) : opt_.margin - 6;
            double Y = xaxis ? opt_.margin + opt_.height + 16 : py(vy);
            std::string anchor = xaxis ? "middle" : "end";
            return "<text x=\"" + fmt(X) + "\" y=\"" + fmt(Y) + "\" font-size=\"11\" text-anchor=\"" +
                   anchor + "\" font-family=\"sans-serif\">" + text + "</text>\n";
        };
        std::string out;
        out += label(opt_.window.x0, 0, detail::fmt_double(opt_.window.x0), true);
        out += label(opt_.window.x1, 0, detail::fmt_double(opt_.window.x1), true);
        out += label(0, opt_.window.y0, detail::fmt_double(opt_.window.y0), false);
        out += label(0, opt_.window.y1, detail::fmt_double(opt_.window.y1), false);
        return out;
    }

    Options opt_;
    std::string body_;
};

}  // namespace ovalix
