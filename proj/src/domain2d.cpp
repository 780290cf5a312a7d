#include "roughbv/domain2d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "roughbv/io.hpp"

namespace roughbv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seg_dist(const Pt& p, const std::array<double, 4>& s) {
  double ux = s[2] - s[0], uy = s[3] - s[1];
  double len2 = ux * ux + uy * uy;
  double t = len2 > 0 ? ((p[0] - s[0]) * ux + (p[1] - s[1]) * uy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double dx = p[0] - (s[0] + t * ux), dy = p[1] - (s[1] + t * uy);
  return std::sqrt(dx * dx + dy * dy);
}

// chain of polyline vertices -> segments + samples at spacing ~ target
void add_chain(GridDomain& dom, const std::vector<Pt>& verts, double target_spacing,
               int chain_id, bool closed = false) {
  double arc = 0.0;
  while (static_cast<int>(dom.chain_len.size()) <= chain_id) {
    dom.chain_len.push_back(0.0);
    dom.chain_closed.push_back(0);
    dom.chain_samples.push_back({});
  }
  for (size_t k = 0; k + 1 < verts.size(); ++k) {
    const Pt &a = verts[k], &b = verts[k + 1];
    int seg = static_cast<int>(dom.segments.size());
    dom.segments.push_back({a[0], a[1], b[0], b[1]});
    dom.seg_chain.push_back(chain_id);
    dom.seg_arc0.push_back(arc);
    double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (len <= 0) continue;
    int cnt = std::max(1, static_cast<int>(std::ceil(len / target_spacing - 1e-9)));
    for (int q = 0; q < cnt; ++q) {
      double t = (q + 0.5) / cnt;
      dom.chain_samples[chain_id].push_back(static_cast<int>(dom.bsample.size()));
      dom.bsample.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
      dom.bweight.push_back(len / cnt);
      dom.sample_chain.push_back(chain_id);
      dom.sample_arc.push_back(arc + t * len);
      dom.sample_seg.push_back(seg);
    }
    arc += len;
  }
  dom.chain_len[chain_id] = arc;
  dom.chain_closed[chain_id] = closed ? 1 : 0;
}

// inside test for a closed polygon (even-odd rule)
bool in_polygon(const Pt& p, const std::vector<Pt>& poly) {
  bool in = false;
  for (size_t k = 0, l = poly.size() - 1; k < poly.size(); l = k++) {
    if ((poly[k][1] > p[1]) != (poly[l][1] > p[1])) {
      double xi = poly[l][0] + (p[1] - poly[l][1]) / (poly[k][1] - poly[l][1]) *
                                   (poly[k][0] - poly[l][0]);
      if (p[0] < xi) in = !in;
    }
  }
  return in;
}

std::vector<Pt> koch_curve(int depth) {
  // classic Koch replacement, bump pointing down (into the exterior)
  std::vector<Pt> pts = {{0.0, 0.0}, {1.0, 0.0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Pt> next;
    next.reserve(pts.size() * 4);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      Pt a = pts[k], b = pts[k + 1];
      double dx = (b[0] - a[0]) / 3.0, dy = (b[1] - a[1]) / 3.0;
      Pt p1 = {a[0] + dx, a[1] + dy};
      Pt p3 = {a[0] + 2 * dx, a[1] + 2 * dy};
      // rotate (dx,dy) by -60 degrees for the downward tip
      const double c = 0.5, s = -std::sqrt(3.0) / 2.0;
      Pt p2 = {p1[0] + c * dx - s * dy, p1[1] + s * dx + c * dy};
      next.push_back(a);
      next.push_back(p1);
      next.push_back(p2);
      next.push_back(p3);
    }
    next.push_back(pts.back());
    pts.swap(next);
  }
  return pts;
}

// squared-distance transform of one row/column (lower envelope of parabolas);
// empty positions carry a large finite sentinel so the envelope stays sane
constexpr double kEdtEmpty = 1e18;

void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (k > 0 && s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    if (k == 0 && s <= z[0]) {
      v[0] = q;  // new parabola dominates everywhere
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (double)(q - v[k]) + f[v[k]];
  }
}

void finalize(GridDomain& dom, double bx0, double by0, double bx1, double by1,
              const std::function<bool(const Pt&)>& inside) {
  const double h = dom.h;
  dom.x0 = bx0 - h;
  dom.y0 = by0 - h;
  dom.nx = static_cast<int>(std::ceil((bx1 - bx0) / h)) + 2;
  dom.ny = static_cast<int>(std::ceil((by1 - by0) / h)) + 2;
  dom.cell_index.assign(static_cast<size_t>(dom.nx) * dom.ny, -1);
  SampleIndex idx(dom);
  double spacing = 0.0;
  for (double w : dom.bweight) spacing = std::max(spacing, w);

  // grid distance transform seeded at the sample nodes gives every cell a
  // tight search radius; the exact distance is then refined over the few
  // samples and segments inside it
  const size_t ngrid = static_cast<size_t>(dom.nx) * dom.ny;
  std::vector<double> sq(ngrid, kEdtEmpty);
  for (const auto& b : dom.bsample) {
    int i = std::clamp(static_cast<int>(std::floor((b[0] - dom.x0) / h)), 0, dom.nx - 1);
    int j = std::clamp(static_cast<int>(std::floor((b[1] - dom.y0) / h)), 0, dom.ny - 1);
    sq[static_cast<size_t>(j) * dom.nx + i] = 0.0;
  }
  {
    std::vector<double> col(dom.ny), dcol, zrow;
    std::vector<int> vrow;
    for (int i = 0; i < dom.nx; ++i) {
      for (int j = 0; j < dom.ny; ++j) col[j] = sq[static_cast<size_t>(j) * dom.nx + i];
      edt_1d(col, dcol, vrow, zrow);
      for (int j = 0; j < dom.ny; ++j) sq[static_cast<size_t>(j) * dom.nx + i] = dcol[j];
    }
    std::vector<double> row(dom.nx), drow;
    for (int j = 0; j < dom.ny; ++j) {
      for (int i = 0; i < dom.nx; ++i) row[i] = sq[static_cast<size_t>(j) * dom.nx + i];
      edt_1d(row, drow, vrow, zrow);
      for (int i = 0; i < dom.nx; ++i) sq[static_cast<size_t>(j) * dom.nx + i] = drow[i];
    }
  }

  for (int j = 0; j < dom.ny; ++j)
    for (int i = 0; i < dom.nx; ++i) {
      Pt p = {dom.x0 + (i + 0.5) * h, dom.y0 + (j + 0.5) * h};
      if (!inside(p)) continue;
      // node-grid distance bounds the true sample distance within 1.5 cells
      double bound = (std::sqrt(sq[static_cast<size_t>(j) * dom.nx + i]) + 1.5) * h;
      double d = kInf;
      idx.for_each_within(p, bound + spacing, [&](int s, double) {
        d = std::min(d, seg_dist(p, dom.segments[dom.sample_seg[s]]));
      });
      if (d <= 0.5 * h) continue;  // one-cell boundary band stays out
      dom.cell_index[static_cast<size_t>(j) * dom.nx + i] = static_cast<int>(dom.cells.size());
      dom.cells.push_back({i, j});
      dom.delta.push_back(d);
    }
  if (dom.cells.size() < 16) throw std::invalid_argument("degenerate domain: fewer than 16 cells");
  double dmax = 0.0;
  for (int c = 0; c < dom.ncells(); ++c) {
    Pt p = dom.center(c);
    for (int c2 = 0; c2 < dom.ncells(); c2 += std::max(1, dom.ncells() / 64)) {
      Pt q = dom.center(c2);
      dmax = std::max(dmax, std::hypot(p[0] - q[0], p[1] - q[1]));
    }
  }
  dom.diameter = dmax;
}

}  // namespace

double GridDomain::dist_to_boundary(const Pt& p) const {
  double d = kInf;
  for (const auto& s : segments) d = std::min(d, seg_dist(p, s));
  return d;
}

GridDomain build_domain(const std::string& kind, const DomainParams& prm) {
  GridDomain dom;
  dom.kind = kind;
  dom.h = prm.h;
  if (!(prm.h > 0)) throw std::invalid_argument("grid spacing must be positive");

  if (kind == "disk") {
    const double R = prm.radius;
    if (16.0 * prm.h > 2.0 * R) throw std::invalid_argument("h too coarse for the disk");
    int M = std::max(16, static_cast<int>(std::ceil(2.0 * M_PI * R / prm.h - 1e-9)));
    std::vector<Pt> verts(M + 1);
    for (int k = 0; k <= M; ++k) {
      double th = 2.0 * M_PI * k / M;
      verts[k] = {R * std::cos(th), R * std::sin(th)};
    }
    // uniform samples carry exact total mass 2 pi R
    dom.chain_len.push_back(2.0 * M_PI * R);
    dom.chain_closed.push_back(1);
    dom.chain_samples.push_back({});
    const double spacing = 2.0 * M_PI * R / M;
    for (int k = 0; k < M; ++k) {
      dom.segments.push_back({verts[k][0], verts[k][1], verts[k + 1][0], verts[k + 1][1]});
      dom.seg_chain.push_back(0);
      dom.seg_arc0.push_back(k * spacing);
      double th = 2.0 * M_PI * (k + 0.5) / M;
      dom.chain_samples[0].push_back(k);
      dom.bsample.push_back({R * std::cos(th), R * std::sin(th)});
      dom.bweight.push_back(spacing);
      dom.sample_chain.push_back(0);
      dom.sample_arc.push_back((k + 0.5) * spacing);
      dom.sample_seg.push_back(k);
    }
    finalize(dom, -R, -R, R, R,
             [R](const Pt& p) { return p[0] * p[0] + p[1] * p[1] < R * R; });
  } else if (kind == "halfspace_box") {
    const double W = prm.width, T = prm.height;
    if (16.0 * prm.h > std::min(W, T)) throw std::invalid_argument("h too coarse for the box");
    // physical boundary: the flat bottom side; the other three sides are an
    // artificial truncation of the half plane
    int cnt = std::max(1, static_cast<int>(std::ceil(W / prm.h - 1e-9)));
    dom.segments.push_back({0.0, 0.0, W, 0.0});
    dom.seg_chain.push_back(0);
    dom.seg_arc0.push_back(0.0);
    dom.chain_len.push_back(W);
    dom.chain_closed.push_back(0);
    dom.chain_samples.push_back({});
    for (int q = 0; q < cnt; ++q) {
      dom.chain_samples[0].push_back(q);
      dom.bsample.push_back({(q + 0.5) * W / cnt, 0.0});
      dom.bweight.push_back(W / cnt);
      dom.sample_chain.push_back(0);
      dom.sample_arc.push_back((q + 0.5) * W / cnt);
      dom.sample_seg.push_back(0);
    }
    finalize(dom, 0, 0, W, T, [W, T](const Pt& p) {
      return p[0] > 0 && p[0] < W && p[1] > 0 && p[1] < T;
    });
  } else if (kind == "sawtooth") {
    // closed polygon: the sawtooth graph at the bottom, straight sides and
    // top; the whole boundary is physical and carries surface measure
    const double W = prm.width, T = prm.height, L = prm.L;
    const int teeth = 8;
    const double A = L * W / (2.0 * teeth);  // peak-to-valley with slope L
    const double base = 0.1 * T;
    std::vector<Pt> verts;
    for (int k = 0; k <= 2 * teeth; ++k) {
      double x = W * k / (2.0 * teeth);
      verts.push_back({x, base + (k % 2 == 0 ? 0.0 : A)});
    }
    std::vector<Pt> graph = verts;
    verts.push_back({W, T});
    verts.push_back({0, T});
    verts.push_back({0, base});
    add_chain(dom, verts, prm.h, 0, /*closed=*/true);
    auto sx = [graph, W, teeth](double x) {
      double t = x / W * 2.0 * teeth;
      int k = std::clamp(static_cast<int>(t), 0, 2 * teeth - 1);
      double fr = t - k;
      return graph[k][1] + fr * (graph[k + 1][1] - graph[k][1]);
    };
    finalize(dom, 0, base, W, T, [sx, W, T](const Pt& p) {
      return p[0] > 0 && p[0] < W && p[1] < T && p[1] > sx(p[0]);
    });
  } else if (kind == "koch") {
    if (prm.depth < 1 || prm.depth > 6) throw std::invalid_argument("koch depth must be in [1,6]");
    std::vector<Pt> curve = koch_curve(prm.depth);
    // samples per smallest segment, weights summing to (4/3)^depth exactly
    const double seg_len = std::pow(3.0, -prm.depth);
    int per = std::max(1, static_cast<int>(std::ceil(seg_len / prm.h - 1e-9)));
    double arc = 0.0;
    dom.chain_len.push_back(0.0);
    dom.chain_closed.push_back(0);
    dom.chain_samples.push_back({});
    for (size_t k = 0; k + 1 < curve.size(); ++k) {
      const Pt &a = curve[k], &b = curve[k + 1];
      dom.segments.push_back({a[0], a[1], b[0], b[1]});
      dom.seg_chain.push_back(0);
      dom.seg_arc0.push_back(arc);
      for (int q = 0; q < per; ++q) {
        double t = (q + 0.5) / per;
        dom.chain_samples[0].push_back(static_cast<int>(dom.bsample.size()));
        dom.bsample.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        dom.bweight.push_back(seg_len / per);
        dom.sample_chain.push_back(0);
        dom.sample_arc.push_back(arc + t * seg_len);
        dom.sample_seg.push_back(static_cast<int>(k));
      }
      arc += seg_len;
    }
    dom.chain_len[0] = arc;
    std::vector<Pt> below(curve);
    below.push_back({1.0, -0.5});
    below.push_back({0.0, -0.5});
    finalize(dom, 0, -0.4, 1.0, 0.6, [below](const Pt& p) {
      return p[0] > 0 && p[0] < 1.0 && p[1] < 0.6 && !in_polygon(p, below) && p[1] > -0.4;
    });
  } else if (kind == "cantor_complement") {
    if (prm.depth < 1 || prm.depth > 5)
      throw std::invalid_argument("cantor_complement depth must be in [1,5]");
    // four-corner Cantor squares inside [0,1]^2, outer box [-1/4, 5/4]^2
    std::vector<Pt> corners = {{0.0, 0.0}};
    double side = 1.0;
    for (int d = 0; d < prm.depth; ++d) {
      side /= 4.0;
      std::vector<Pt> next;
      const double off = 3.0 * side;
      for (auto& c : corners) {
        next.push_back({c[0], c[1]});
        next.push_back({c[0] + off, c[1]});
        next.push_back({c[0], c[1] + off});
        next.push_back({c[0] + off, c[1] + off});
      }
      corners.swap(next);
    }
    int chain = 0;
    for (auto& c : corners) {
      std::vector<Pt> sq = {{c[0], c[1]},
                            {c[0] + side, c[1]},
                            {c[0] + side, c[1] + side},
                            {c[0], c[1] + side},
                            {c[0], c[1]}};
      add_chain(dom, sq, std::min(prm.h, side / 2.0), chain++, /*closed=*/true);
    }
    const double m = 0.25;
    std::vector<Pt> outer = {{-m, -m}, {1 + m, -m}, {1 + m, 1 + m}, {-m, 1 + m}, {-m, -m}};
    add_chain(dom, outer, prm.h, chain, /*closed=*/true);
    const int depth = prm.depth;
    auto in_square = [depth](const Pt& p) {
      // digit test: each level keeps the first and last quarter per axis
      double u = p[0], v = p[1];
      for (int d = 0; d < depth; ++d) {
        u *= 4.0;
        v *= 4.0;
        if (u <= 1.0)
          ;
        else if (u >= 3.0)
          u -= 3.0;
        else
          return false;
        if (v <= 1.0)
          ;
        else if (v >= 3.0)
          v -= 3.0;
        else
          return false;
      }
      return u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0;
    };
    finalize(dom, -m, -m, 1 + m, 1 + m, [in_square, m](const Pt& p) {
      return p[0] > -m && p[0] < 1 + m && p[1] > -m && p[1] < 1 + m && !in_square(p);
    });
  } else if (kind == "slit") {
    const double W = prm.width, T = prm.height;
    std::vector<Pt> slit = {{0.5 * W, 0.0}, {0.5 * W, 0.5 * T}};
    add_chain(dom, slit, prm.h, 0);
    std::vector<Pt> outer = {{0, 0}, {W, 0}, {W, T}, {0, T}, {0, 0}};
    add_chain(dom, outer, prm.h, 1, /*closed=*/true);
    const double hw = 0.495 * prm.h;
    finalize(dom, 0, 0, W, T, [W, T, hw](const Pt& p) {
      bool in_box = p[0] > 0 && p[0] < W && p[1] > 0 && p[1] < T;
      bool in_slit = std::abs(p[0] - 0.5 * W) <= hw && p[1] <= 0.5 * T;
      return in_box && !in_slit;
    });
  } else {
    throw std::invalid_argument("unknown domain kind: " + kind);
  }
  return dom;
}

GridDomain build_domain_from_spec(const std::string& spec) {
  DomainParams prm;
  std::string kind;
  std::string token;
  std::string norm = spec;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream is(norm);
  while (is >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("domain spec tokens must be key=value: " + token);
    std::string key = token.substr(0, eq), val = token.substr(eq + 1);
    if (key == "kind")
      kind = val;
    else if (key == "h")
      prm.h = std::stod(val);
    else if (key == "depth")
      prm.depth = std::stoi(val);
    else if (key == "L")
      prm.L = std::stod(val);
    else if (key == "radius")
      prm.radius = std::stod(val);
    else if (key == "width")
      prm.width = std::stod(val);
    else if (key == "height")
      prm.height = std::stod(val);
    else
      throw std::invalid_argument("unknown domain spec key: " + key);
  }
  if (kind.empty()) throw std::invalid_argument("domain spec needs kind=...");
  return build_domain(kind, prm);
}

double corkscrew_check(const GridDomain& dom, int samples) {
  if (samples < 1) throw std::invalid_argument("corkscrew_check needs samples >= 1");
  const int ns = static_cast<int>(dom.bsample.size());
  const int stride = std::max(1, ns / samples);
  double worst = kInf;
  for (int s = 0; s < ns; s += stride) {
    const Pt& x = dom.bsample[s];
    for (double r = 16.0 * dom.h; r <= 0.5 * dom.diameter; r *= 2.0) {
      double best = 0.0;
      int i0 = static_cast<int>(std::floor((x[0] - r - dom.x0) / dom.h));
      int i1 = static_cast<int>(std::ceil((x[0] + r - dom.x0) / dom.h));
      int j0 = static_cast<int>(std::floor((x[1] - r - dom.y0) / dom.h));
      int j1 = static_cast<int>(std::ceil((x[1] + r - dom.y0) / dom.h));
      for (int j = std::max(j0, 0); j <= std::min(j1, dom.ny - 1); ++j)
        for (int i = std::max(i0, 0); i <= std::min(i1, dom.nx - 1); ++i) {
          int c = dom.cell_at(i, j);
          if (c < 0) continue;
          Pt p = dom.center(c);
          double d = std::hypot(p[0] - x[0], p[1] - x[1]);
          if (d >= r) continue;
          best = std::max(best, std::min(dom.delta[c], r - d));
        }
      worst = std::min(worst, best / r);
    }
  }
  return worst;
}

MetricMeasureSpace boundary_space(const GridDomain& dom) {
  MetricMeasureSpace X;
  X.kind = MetricKind::kEuclid2D;
  X.xy = dom.bsample;
  X.weight = dom.bweight;
  X.lambda = 8.0;
  X.ahlfors_dim = 1.0;
  X.label = "boundary:" + dom.kind;
  return X;
}

bool domain_connected(const GridDomain& dom) {
  if (dom.cells.empty()) return true;
  std::vector<bool> seen(dom.cells.size(), false);
  std::deque<int> queue = {0};
  seen[0] = true;
  size_t cnt = 1;
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    int i = dom.cells[c][0], j = dom.cells[c][1];
    for (auto [di, dj] : {std::array<int, 2>{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      int nb = dom.cell_at(i + di, j + dj);
      if (nb >= 0 && !seen[nb]) {
        seen[nb] = true;
        ++cnt;
        queue.push_back(nb);
      }
    }
  }
  return cnt == dom.cells.size();
}

std::string cells_csv(const GridDomain& dom) {
  std::ostringstream ss;
  ss << "i,j,x,y,delta\n";
  for (int c = 0; c < dom.ncells(); ++c) {
    Pt p = dom.center(c);
    ss << dom.cells[c][0] << ',' << dom.cells[c][1] << ',' << fmt(p[0]) << ',' << fmt(p[1]) << ','
       << fmt(dom.delta[c]) << "\n";
  }
  return ss.str();
}

GridDomain::Deposit GridDomain::deposit(const Pt& p, const SampleIndex& idx) const {
  double ds;
  int s_near = idx.nearest(p, &ds);
  double spacing = 0.0;
  for (double w : bweight) spacing = std::max(spacing, w);
  // candidate segments: those carrying samples near the closest one
  int best_seg = sample_seg[s_near];
  double best_d = seg_dist(p, segments[best_seg]);
  idx.for_each_within(p, ds + spacing, [&](int s, double) {
    double d = seg_dist(p, segments[sample_seg[s]]);
    if (d < best_d) {
      best_d = d;
      best_seg = sample_seg[s];
    }
  });
  const auto& sg = segments[best_seg];
  double ux = sg[2] - sg[0], uy = sg[3] - sg[1];
  double len2 = ux * ux + uy * uy;
  double t = len2 > 0 ? std::clamp(((p[0] - sg[0]) * ux + (p[1] - sg[1]) * uy) / len2, 0.0, 1.0)
                      : 0.0;
  const int chain = seg_chain[best_seg];
  double arc = seg_arc0[best_seg] + t * std::sqrt(len2);
  const auto& ids = chain_samples[chain];
  const double clen = chain_len[chain];
  const bool wrap = chain_closed[chain] != 0;

  Deposit dep;
  if (ids.size() < 2) {
    dep.s0 = ids.empty() ? s_near : ids[0];
    return dep;
  }
  // samples are stored in increasing arc order within the chain
  auto arc_of = [&](int k) { return sample_arc[ids[k]]; };
  int hi = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), arc,
                                             [&](int id, double a) { return sample_arc[id] < a; }) -
                            ids.begin());
  int lo = hi - 1;
  double a_lo, a_hi;
  if (hi == 0) {
    if (wrap) {
      lo = static_cast<int>(ids.size()) - 1;
      a_lo = arc_of(lo) - clen;
      a_hi = arc_of(0);
    } else {
      dep.s0 = ids[0];
      return dep;
    }
  } else if (hi == static_cast<int>(ids.size())) {
    if (wrap) {
      a_lo = arc_of(lo);
      hi = 0;
      a_hi = arc_of(0) + clen;
    } else {
      dep.s0 = ids[lo];
      return dep;
    }
  } else {
    a_lo = arc_of(lo);
    a_hi = arc_of(hi);
  }
  double w1 = (arc - a_lo) / (a_hi - a_lo);
  dep.s0 = ids[lo];
  dep.s1 = ids[hi];
  dep.w0 = 1.0 - w1;
  dep.w1 = w1;
  return dep;
}

SampleIndex::SampleIndex(const GridDomain& dom) {
  pts_ = dom.bsample;
  if (pts_.empty()) throw std::invalid_argument("SampleIndex needs boundary samples");
  double xlo = kInf, xhi = -kInf, ylo = kInf, yhi = -kInf;
  for (const auto& p : pts_) {
    xlo = std::min(xlo, p[0]); xhi = std::max(xhi, p[0]);
    ylo = std::min(ylo, p[1]); yhi = std::max(yhi, p[1]);
  }
  double spacing = 0.0;
  for (double w : dom.bweight) spacing = std::max(spacing, w);
  bsize_ = std::max({4.0 * spacing, (xhi - xlo) / 512.0, (yhi - ylo) / 512.0, 1e-9});
  bx0_ = xlo - bsize_;
  by0_ = ylo - bsize_;
  bnx_ = static_cast<int>(std::ceil((xhi - bx0_) / bsize_)) + 2;
  bny_ = static_cast<int>(std::ceil((yhi - by0_) / bsize_)) + 2;
  buckets_.assign(static_cast<size_t>(bnx_) * bny_, {});
  for (size_t s = 0; s < pts_.size(); ++s) {
    int i = std::clamp(bucket_of(pts_[s][0], bx0_), 0, bnx_ - 1);
    int j = std::clamp(bucket_of(pts_[s][1], by0_), 0, bny_ - 1);
    buckets_[static_cast<size_t>(j) * bnx_ + i].push_back(static_cast<int>(s));
  }
}

int SampleIndex::nearest(const Pt& p, double* dist_out) const {
  int ic = std::clamp(bucket_of(p[0], bx0_), 0, bnx_ - 1);
  int jc = std::clamp(bucket_of(p[1], by0_), 0, bny_ - 1);
  int best = -1;
  double bd = kInf;
  const int rings = std::max(bnx_, bny_);
  for (int ring = 0; ring <= rings; ++ring) {
    // once a candidate exists, one extra ring settles the answer
    if (best >= 0 && (ring - 1) * bsize_ > bd) break;
    int i0 = std::max(ic - ring, 0), i1 = std::min(ic + ring, bnx_ - 1);
    int j0 = std::max(jc - ring, 0), j1 = std::min(jc + ring, bny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        if (ring > 0 && i != i0 && i != i1 && j != j0 && j != j1) continue;  // ring shell only
        for (int s : buckets_[static_cast<size_t>(j) * bnx_ + i]) {
          double dx = pts_[s][0] - p[0], dy = pts_[s][1] - p[1];
          double d = std::sqrt(dx * dx + dy * dy);
          if (d < bd) {
            bd = d;
            best = s;
          }
        }
      }
  }
  if (dist_out) *dist_out = bd;
  return best;
}

std::string boundary_csv(const GridDomain& dom) {
  std::ostringstream ss;
  ss << "x,y,weight\n";
  for (size_t s = 0; s < dom.bsample.size(); ++s)
    ss << fmt(dom.bsample[s][0]) << ',' << fmt(dom.bsample[s][1]) << ',' << fmt(dom.bweight[s])
       << "\n";
  return ss.str();
}

}  // namespace roughbv
