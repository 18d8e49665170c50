#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmtkit {

// Minimal deterministic SVG emitter: fixed-precision coordinates, no
// timestamps, element order follows call order, so identical inputs give
// byte-identical files.
class SvgCanvas {
public:
    SvgCanvas(double width, double height) : width_(width), height_(height) {
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) +
                 "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " +
                 fmt(height_) + "\">\n";
        body_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
                 "\" fill=\"" + fill + "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0) {
        body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                 "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt(width) + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.0) {
        if (pts.empty()) return;
        body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) +
                 "\" points=\"";
        for (const auto& [x, y] : pts) body_ += fmt(x) + "," + fmt(y) + " ";
        body_ += "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 10) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%d", size);
        body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + buf +
                 "\" font-family=\"monospace\">" + s + "</text>\n";
    }

    std::string finish() const { return body_ + "</svg>\n"; }

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("SvgCanvas: cannot open " + path);
        os << finish();
    }

    double width() const { return width_; }
    double height() const { return height_; }

private:
    static std::string fmt(double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return buf;
    }

    double width_, height_;
    std::string body_;
};

// Affine map from a data rectangle to canvas coordinates (y flipped).
struct PlotFrame {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    double margin = 40.0;
    double width = 640.0, height = 480.0;

    std::pair<double, double> map(double x, double y) const {
        const double sx = (width - 2 * margin) / (x_hi > x_lo ? x_hi - x_lo : 1.0);
        const double sy = (height - 2 * margin) / (y_hi > y_lo ? y_hi - y_lo : 1.0);
        return {margin + (x - x_lo) * sx, height - margin - (y - y_lo) * sy};
    }

    void draw_axes(SvgCanvas& canvas, const std::string& x_label,
                   const std::string& y_label) const {
        canvas.line(margin, height - margin, width - margin, height - margin, "black");
        canvas.line(margin, margin, margin, height - margin, "black");
        canvas.text(width / 2.0, height - margin / 3.0, x_label);
        canvas.text(margin / 4.0, margin / 2.0, y_label);
    }
};

inline const char* layer_color(std::size_t layer) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};
    return palette[layer % 8];
}

}  // namespace gmtkit
