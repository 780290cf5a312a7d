#include "roughbv/svg.hpp"

namespace roughbv {

std::string svg_heatmap(const std::vector<std::array<int, 2>>& cells,
                        const std::vector<double>& values, int ni, int nj,
                        const std::string& title) {
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (!(vmin < vmax)) { vmin -= 1; vmax += 1; }
  const int w = 640, hh = 640 + 30;
  const double sx = 620.0 / std::max(ni, 1), sy = 620.0 / std::max(nj, 1);
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << hh
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  ss << "<text x=\"10\" y=\"20\" font-size=\"14\">" << title << " [" << fmt(vmin, 4) << ", "
     << fmt(vmax, 4) << "]</text>\n";
  for (size_t k = 0; k < cells.size(); ++k) {
    double t = (values[k] - vmin) / (vmax - vmin);
    int shade = static_cast<int>(255.0 * (1.0 - t));
    ss << "<rect x=\"" << fmt(10 + cells[k][0] * sx, 6) << "\" y=\""
       << fmt(30 + (nj - 1 - cells[k][1]) * sy, 6) << "\" width=\"" << fmt(sx + 0.5, 4)
       << "\" height=\"" << fmt(sy + 0.5, 4) << "\" fill=\"rgb(" << shade << ',' << shade
       << ",255)\"/>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace roughbv
