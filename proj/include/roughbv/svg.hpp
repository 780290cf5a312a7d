#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "roughbv/io.hpp"

namespace roughbv {

// Minimal self-contained SVG plotter: scatter and polyline series on linear
// or log-log axes. Enough for decay slopes and reverse-Holder scatter plots.
class SvgPlot {
public:
  SvgPlot(std::string title, bool loglog = false) : title_(std::move(title)), loglog_(loglog) {}

  void add_series(const std::string& name, std::vector<double> x, std::vector<double> y,
                  bool line = false) {
    series_.push_back({name, std::move(x), std::move(y), line});
  }

  std::string render(int w = 640, int h = 440) const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
      for (size_t i = 0; i < s.x.size(); ++i) {
        double px = tx(s.x[i]), py = tx(s.y[i]);
        if (!std::isfinite(px) || !std::isfinite(py)) continue;
        xmin = std::min(xmin, px); xmax = std::max(xmax, px);
        ymin = std::min(ymin, py); ymax = std::max(ymax, py);
      }
    if (!(xmin < xmax)) { xmin -= 1; xmax += 1; }
    if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }
    const double ml = 60, mr = 20, mt = 40, mb = 45;
    auto X = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto Y = [&](double v) { return h - mb - (tx(v) - ymin) / (ymax - ymin) * (h - mt - mb); };

    static const char* colors[] = {"#1f6fb2", "#d45500", "#2ca05a", "#8c4fb8", "#b23a48", "#666666"};
    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    ss << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << title_ << (loglog_ ? " (log-log)" : "") << "</text>\n";
    ss << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr) << "\" height=\""
       << (h - mt - mb) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    // axis extremes
    ss << "<text x=\"" << ml << "\" y=\"" << h - mb + 16 << "\" font-size=\"11\">" << axis_label(xmin)
       << "</text>\n";
    ss << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 16
       << "\" text-anchor=\"end\" font-size=\"11\">" << axis_label(xmax) << "</text>\n";
    ss << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb << "\" text-anchor=\"end\" font-size=\"11\">"
       << axis_label(ymin) << "</text>\n";
    ss << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
       << "\" text-anchor=\"end\" font-size=\"11\">" << axis_label(ymax) << "</text>\n";

    for (size_t k = 0; k < series_.size(); ++k) {
      const auto& s = series_[k];
      const char* col = colors[k % 6];
      if (s.line && s.x.size() > 1) {
        ss << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) ss << fmt(X(s.x[i]), 6) << ',' << fmt(Y(s.y[i]), 6) << ' ';
        ss << "\"/>\n";
      }
      for (size_t i = 0; i < s.x.size(); ++i)
        ss << "<circle cx=\"" << fmt(X(s.x[i]), 6) << "\" cy=\"" << fmt(Y(s.y[i]), 6)
           << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
      ss << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 + 14 * k << "\" font-size=\"12\" fill=\""
         << col << "\">" << s.name << "</text>\n";
    }
    ss << "</svg>\n";
    return ss.str();
  }

  void save(const std::string& path, int w = 640, int h = 440) const {
    write_text_file(path, render(w, h));
  }

private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
    bool line;
  };

  double tx(double v) const {
    if (!loglog_) return v;
    return v > 0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
  }
  std::string axis_label(double t) const {
    return loglog_ ? ("1e" + fmt(t, 3)) : fmt(t, 4);
  }

  std::string title_;
  bool loglog_;
  std::vector<Series> series_;
};

// Grayscale cell heatmap for fields on a grid; cells given as (i, j, value).
std::string svg_heatmap(const std::vector<std::array<int, 2>>& cells,
                        const std::vector<double>& values, int ni, int nj,
                        const std::string& title);

}  // namespace roughbv
